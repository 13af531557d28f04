import json

import numpy as np
import pytest

from discordant import stateio
from discordant.errors import CPViolation, ShapeError, ValidationError


class TestDocuments:
    def test_mueller(self, ex1):
        np.testing.assert_allclose(stateio.mueller_from_document(stateio.mueller_document(ex1)), ex1)

    def test_rho_round_trip(self, ex1):
        np.testing.assert_allclose(stateio.mueller_from_document(stateio.rho_document(ex1)), ex1, atol=1e-15)

    def test_xparams(self):
        doc = {"xparams": {"rho00": 0.4, "rho11": 0.2, "rho22": 0.1, "rho33": 0.3,
                           "rho03": 0.2, "rho12": 0.1, "phi1": 0.3}}
        m = stateio.mueller_from_document(doc)
        assert m[1, 2] != 0

    def test_ellipsoid(self):
        doc = {"ellipsoid": {"ax": 0.65, "ay": 0.59, "az": 0.58, "zc": 0.4, "zI": 0.5}}
        m = stateio.mueller_from_document(doc)
        assert m[3, 0] == pytest.approx(0.5)

    def test_family(self):
        m = stateio.mueller_from_document({"family": {"kind": "BellMixture", "params": [1, 0, 0, 0]}})
        np.testing.assert_allclose(m, np.eye(4))

    def test_load(self, tmp_path, ex1):
        p = tmp_path / "s.json"
        p.write_text(json.dumps(stateio.mueller_document(ex1)))
        np.testing.assert_allclose(stateio.load_mueller(p), ex1)


class TestErrors:
    @pytest.mark.parametrize("doc", [
        [], {}, {"mueller": [[1]], "rho": [[1]]}, {"mueller": [[1, 0], [0, 1]]},
        {"xparams": {"rho00": 1}}, {"family": {"kind": "Nope", "params": []}},
        {"rho": [[[1, 0, 0]]]},
    ])
    def test_validation(self, doc):
        with pytest.raises(ValidationError):
            stateio.mueller_from_document(doc)

    def test_shape_error_passes_through(self):
        m = np.eye(4)
        m[0, 1] = 0.3
        with pytest.raises(ShapeError):
            from discordant.optimizer import discord
            discord(stateio.mueller_from_document({"mueller": m.tolist()}))

    def test_cp_error_from_family(self):
        with pytest.raises(CPViolation):
            stateio.mueller_from_document({"family": {"kind": "Linear", "params": [0.9, 0.5, 0.3, 0.1]}})

    def test_bad_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        with pytest.raises(ValidationError) as exc:
            stateio.load_mueller(p)
        assert exc.value.invariant == "json"
