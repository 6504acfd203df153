import csv

import numpy as np
import pytest
from sklearn.base import clone

from qrprep.cli import main, parse_grid
from qrprep.estimators import MixingOptimizer, ReservoirEmitter
from qrprep.experiments import HEADER, target_state
from qrprep.experiments.catalog import DEFAULT_GRID


class TestCli:
    def test_list(self, capsys):
        assert main(["list"]) == 0
        out = capsys.readouterr().out
        assert "me3" in out and "concentrate2" in out

    def test_grid_parsing(self):
        assert parse_grid("grid") == DEFAULT_GRID
        assert parse_grid("0.01, 1") == (0.01, 1.0)
        assert parse_grid("grid:0.01:1:3") == pytest.approx((0.01, 0.1, 1.0))

    def test_run(self, tmp_path):
        out = tmp_path / "r.csv"
        code = main(["run", "--experiment", "w2", "--gamma-over-p", "0.01", "--realizations", "2",
                     "--trainer-steps", "20", "--out", str(out)])
        assert code == 0
        rows = list(csv.reader(out.open()))
        assert tuple(rows[0]) == HEADER and len(rows) == 3

    def test_io_error(self, tmp_path):
        code = main(["run", "--experiment", "w2", "--gamma-over-p", "0.01", "--realizations", "1",
                     "--trainer-steps", "5", "--out", str(tmp_path / "no" / "r.csv")])
        assert code == 3

    def test_nonconvergence_exit_code(self, tmp_path, monkeypatch):
        from qrprep.experiments import runners
        from qrprep.reservoir import ConvergenceError

        def boom(*a, **k):
            raise ConvergenceError("stuck")

        monkeypatch.setattr(runners, "steady_state", boom)
        code = main(["run", "--experiment", "me3", "--gamma-over-p", "0.01", "--realizations", "1",
                     "--out", str(tmp_path / "r.csv")])
        assert code == 2

    def test_bad_arguments(self, tmp_path):
        with pytest.raises(SystemExit):
            main(["run", "--experiment", "nope", "--out", str(tmp_path / "r.csv")])
        assert main(["run", "--experiment", "me3", "--gamma-over-p", "-1", "--out", str(tmp_path / "r.csv")]) == 1


class TestEstimators:
    def test_emitter(self):
        em = ReservoirEmitter(node_count=2, gamma_over_p=0.01, random_state=0)
        rho = em.fit_transform()
        assert rho.shape == (4, 4) and abs(np.trace(rho) - 1) < 1e-10
        assert em.get_params()["node_count"] == 2
        coh = ReservoirEmitter(2, 0.01, pump="coherent", duration=np.pi / 2, random_state=0).fit()
        assert coh.transform().shape == (4, 4)

    def test_optimizer(self):
        rho = ReservoirEmitter(2, 0.01, random_state=1).fit_transform()
        opt = MixingOptimizer(target=target_state("noon", 2), statistics="bosonic", random_steps=50,
                              genetic_steps=50, random_state=3)
        opt.fit(rho)
        assert opt.unitary_.shape == (2, 2) and opt.angles_.shape == (4,)
        assert opt.score(rho) == pytest.approx(opt.best_score_)
        assert opt.transform(rho).shape == (6, 6)
        assert opt.postselection_probability(rho) == pytest.approx(1.0)
        assert clone(opt).get_params()["random_steps"] == 50

    def test_reproducible(self):
        rho = ReservoirEmitter(2, 0.01, random_state=1).fit_transform()
        kw = dict(objective="negativity", statistics="bosonic", random_steps=20, genetic_steps=10, random_state=5)
        a, b = MixingOptimizer(**kw).fit(rho), MixingOptimizer(**kw).fit(rho)
        assert np.array_equal(a.angles_, b.angles_)

    def test_errors(self):
        opt = MixingOptimizer(objective="negativity", statistics="bosonic")
        with pytest.raises(Exception):
            opt.transform(np.eye(4) / 4)
        with pytest.raises(ValueError):
            opt.fit(np.eye(3) / 3)
        with pytest.raises(ValueError):
            ReservoirEmitter(gamma_over_p=-1).fit()
