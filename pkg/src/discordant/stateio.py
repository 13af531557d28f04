"""JSON state files.

One of the following top-level keys is recognised:

``rho``
    4x4 nested list of ``[re, im]`` pairs (plain reals are accepted too).
``mueller``
    4x4 nested list of reals.
``xparams``
    ``{"rho00", "rho11", "rho22", "rho33", "rho03", "rho12", "phi1", "phi2"}``;
    the phases default to zero.
``ellipsoid``
    ``{"ax", "ay", "az", "zc", "zI", "eps"}``.
``family``
    ``{"kind": <FamilyKind value>, "params": [...]}``.
"""
import json

import numpy as np

from .ellipsoid import EllipsoidParams, to_mueller
from .errors import DiscordantError, ValidationError
from .families import FamilyKind, FamilySpec, build_family
from .qcore import density_from_mueller, mueller_from_density, x_density

KEYS = ("rho", "mueller", "xparams", "ellipsoid", "family")


def _parse_rho(raw):
    arr = []
    for row in raw:
        out_row = []
        for v in row:
            if isinstance(v, (list, tuple)):
                if len(v) != 2:
                    raise ValidationError("rho_format", "complex entries must be [re, im] pairs")
                out_row.append(complex(float(v[0]), float(v[1])))
            else:
                out_row.append(complex(float(v)))
        arr.append(out_row)
    rho = np.array(arr, dtype=complex)
    if rho.shape != (4, 4):
        raise ValidationError("shape", f"rho must be 4x4, got {rho.shape}")
    return rho


def mueller_from_document(doc):
    """Mueller matrix described by a parsed JSON document."""
    if not isinstance(doc, dict):
        raise ValidationError("document", "state file must hold a JSON object")
    found = [k for k in KEYS if k in doc]
    if len(found) != 1:
        raise ValidationError("document", f"expected exactly one of {', '.join(KEYS)}; found {found or 'none'}")
    key = found[0]
    body = doc[key]
    try:
        if key == "rho":
            return mueller_from_density(_parse_rho(body))
        if key == "mueller":
            m = np.array(body, dtype=float)
            if m.shape != (4, 4):
                raise ValidationError("shape", f"mueller must be 4x4, got {m.shape}")
            return m
        if key == "xparams":
            rho = x_density(body["rho00"], body["rho11"], body["rho22"], body["rho33"],
                            body["rho03"], body["rho12"], body.get("phi1", 0.0), body.get("phi2", 0.0))
            return mueller_from_density(rho)
        if key == "ellipsoid":
            e = EllipsoidParams(float(body["ax"]), float(body["ay"]), float(body["az"]),
                                float(body["zc"]), float(body["zI"]), int(body.get("eps", 1)))
            return to_mueller(e)
        spec = FamilySpec(FamilyKind(body["kind"]), tuple(float(v) for v in body["params"]))
        return build_family(spec)
    except KeyError as exc:
        raise ValidationError("document", f"missing field {exc.args[0]!r} under {key!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, DiscordantError):
            raise
        raise ValidationError("document", f"malformed {key!r} entry: {exc}") from None


def load_mueller(path):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError("json", f"{path}: {exc}") from None
    return mueller_from_document(doc)


def mueller_document(m):
    return {"mueller": np.asarray(m, dtype=float).tolist()}


def rho_document(m):
    rho = density_from_mueller(m)
    return {"rho": [[[float(v.real), float(v.imag)] for v in row] for row in rho]}
