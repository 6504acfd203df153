import math

import numpy as np
import pytest

from qrprep.experiments import (CATALOG, HEADER, ExperimentSpec, RunRecord, read_records,
                                realization_streams, run_experiment, target_state, write_records)
from qrprep.experiments.records import NONCONVERGED
from qrprep.experiments.runners import local_mixer, run_concentration, run_state_preparation, two_copies
from qrprep.metrics import negativity
from qrprep.mixing import to_product_space
from qrprep.qcore import BOSONIC, FERMIONIC, enumerate_basis
from qrprep.trainer import TrainerConfig

FAST = TrainerConfig(random_steps=40, genetic_steps=40)


def spec(name, g=(0.01,), **kw):
    kw.setdefault("realizations", 2)
    kw.setdefault("trainer", FAST)
    return ExperimentSpec(name, g, **kw)


class TestTargets:
    def test_noon2(self):
        psi = target_state("noon", 2)
        b = psi.basis
        assert psi.amplitudes[b.index((2, 0))] == pytest.approx(1 / math.sqrt(2))
        assert psi.amplitudes[b.index((0, 2))] == pytest.approx(1 / math.sqrt(2))

    def test_w3(self):
        psi = target_state("w", 3)
        nz = {psi.basis.states[i] for i in np.flatnonzero(np.abs(psi.amplitudes) > 1e-12)}
        assert nz == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}
        assert np.allclose(np.abs(psi.amplitudes[list(psi.basis.sector(1))]), 1 / math.sqrt(3))

    def test_cl2(self):
        assert np.allclose(target_state("cl", 2).amplitudes, np.array([1, -1, 1, 1]) / 2)

    def test_me3(self):
        psi = target_state("me", 3)
        for occ in ((0, 2), (1, 1), (2, 0)):
            assert psi.amplitudes[psi.basis.index(occ)] == pytest.approx(1 / math.sqrt(3))

    def test_cluster_and_ghz_normalized(self):
        for n in (3, 4):
            assert np.linalg.norm(target_state("cl", n).amplitudes) == pytest.approx(1)
        g = target_state("ghz", 3).amplitudes
        assert g[0] == g[7] == pytest.approx(1 / math.sqrt(2))

    @pytest.mark.parametrize("args", [("me", 1), ("cl", 5), ("w", 1), ("bell", 2)])
    def test_unsupported(self, args):
        with pytest.raises(ValueError):
            target_state(*args)


class TestSpec:
    def test_defaults(self):
        s = ExperimentSpec("w3")
        assert s.realizations == 20 and len(s.gamma_over_p) == 7
        assert ExperimentSpec("me3").realizations == 10
        assert ExperimentSpec("discord_hist").realizations == 200
        assert ExperimentSpec("me3", noise="all_noise").noise == "all"

    @pytest.mark.parametrize("kw", [dict(experiment="me9"), dict(experiment="me3", gamma_over_p=(0.0,)),
                                    dict(experiment="me3", realizations=0), dict(experiment="me3", noise="x"),
                                    dict(experiment="me3", distribution="beta")])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            ExperimentSpec(**kw)

    def test_node_counts(self):
        expect = {"me3": 2, "noon2": 2, "me4": 3, "noon3": 3, "me5": 4, "noon4": 4, "w2": 2, "w3": 3,
                  "w4": 4, "discord_hist": 2}
        for name, n in expect.items():
            assert CATALOG[name].nodes == n
        assert all(CATALOG[f"cl{k}"].nodes <= 5 for k in (2, 3, 4))


class TestStreams:
    def test_independent_of_order(self):
        a = realization_streams(1, "me3", 3)
        realization_streams(1, "me3", 0)
        b = realization_streams(1, "me3", 3)
        assert a[2] == b[2] and a[0].random() == b[0].random()

    def test_distinct(self):
        seeds = {realization_streams(1, e, k)[2] for e in ("me3", "me4") for k in range(3)}
        assert len(seeds) == 6


class TestRuns:
    def test_state_preparation_record_fields(self):
        recs = run_state_preparation(spec("noon2", (0.01, 0.5)))
        assert [(r.gamma_over_p, r.realization) for r in recs] == [(0.01, 0), (0.01, 1), (0.5, 0), (0.5, 1)]
        for r in recs:
            assert 0 <= r.objective <= 1 and r.probability == 1.0 and r.steps <= FAST.genetic_steps
        # same network draws at every Gamma/P
        assert recs[0].seed == recs[2].seed

    def test_deterministic_experiments_have_unit_probability(self):
        for name in ("w2", "cl2"):
            assert all(r.probability == 1.0 for r in run_experiment(spec(name, realizations=1)))

    def test_postselected_probability_in_range(self):
        recs = run_experiment(spec("noon3", realizations=1))
        assert 0 < recs[0].probability < 1

    def test_parallel_matches_serial(self):
        s = spec("me3", (0.01, 0.1))
        a = run_experiment(s)
        b = run_experiment(s, jobs=2)
        assert [(r.objective, r.seed) for r in a] == [(r.objective, r.seed) for r in b]

    def test_negativity_sweep_labels_and_bound(self):
        recs = run_experiment(spec("negativity_sweep", realizations=1, sweep=("me3", "me4")))
        assert [r.experiment for r in recs] == ["negativity_sweep:me3", "negativity_sweep:me4"]
        assert recs[0].objective <= 1.0 + 1e-9 and recs[1].objective <= 1.5 + 1e-9

    def test_discord_records(self):
        recs = run_experiment(spec("discord_hist", (1.0,), realizations=2, constrained=True))
        for r in recs:
            assert r.objective >= -1e-9 and r.extras["negativity"] <= 1e-6 and r.extras["feasible"]

    def test_concentration_separable_input(self):
        from qrprep.objective import NEGATIVITY, Objective
        pair_basis = enumerate_basis(2, BOSONIC, 2)
        rho = np.zeros((6, 6), complex)
        for occ, w in (((0, 0), 0.5), ((1, 0), 0.3), ((0, 1), 0.2)):
            rho[pair_basis.index(occ), pair_basis.index(occ)] = w
        four, basis = two_copies(rho, pair_basis)
        bound = Objective(NEGATIVITY, BOSONIC, (0, 2), measured=(1, 3)).bind(four, basis, local_mixer)
        rng = np.random.default_rng(0)
        for _ in range(20):
            assert bound(rng.uniform(-np.pi, np.pi, 8)) == 0.0

    def test_concentration_record(self):
        rec = run_concentration(spec("concentrate2", (0.1,), realizations=1))[0]
        assert rec.extras["input_negativity"] > 0 and rec.objective >= 0 and 0 < rec.probability <= 1

    def test_nonconvergence_is_recorded(self, monkeypatch):
        from qrprep.experiments import runners
        from qrprep.reservoir import ConvergenceError

        def boom(*a, **k):
            raise ConvergenceError("stuck")

        monkeypatch.setattr(runners, "steady_state", boom)
        rec = run_experiment(spec("me3", realizations=1))[0]
        assert rec.status == NONCONVERGED and math.isnan(rec.objective)

    def test_family_guard(self):
        with pytest.raises(ValueError):
            run_concentration(spec("me3"))


class TestConcentrationPieces:
    def test_two_copies_ordering(self):
        pair_basis = enumerate_basis(2, BOSONIC, 2)
        rho = np.zeros((6, 6), complex)
        rho[pair_basis.index((1, 0)), pair_basis.index((1, 0))] = 1
        four, basis = two_copies(rho, pair_basis)
        assert basis.mode_count == 4 and basis.max_total == 4
        assert four[basis.index((1, 1, 0, 0)), basis.index((1, 1, 0, 0))] == 1

    def test_ideal_pairs_concentrate_to_two(self):
        pair_basis = enumerate_basis(2, BOSONIC, 2)
        psi = np.zeros(6, complex)
        for occ in ((0, 2), (1, 1), (2, 0)):
            psi[pair_basis.index(occ)] = 1 / math.sqrt(3)
        four, basis = two_copies(np.outer(psi, psi.conj()), pair_basis)
        prod, dims = to_product_space(four, basis)
        # (A1, A2 | B1, B2): 9-dimensional maximally entangled, negativity 4
        assert negativity(prod, (25, 25)) == pytest.approx(4.0, abs=1e-9)

    def test_local_mixer_is_block_diagonal(self):
        m = local_mixer(np.arange(8.0))
        assert np.allclose(m[:2, 2:], 0) and np.allclose(m[2:, :2], 0)
        assert np.allclose(m.conj().T @ m, np.eye(4))


class TestRecords:
    def rec(self, k=0, g=0.1):
        return RunRecord("me3", k, g, 0.123456789012345, 0.5, 17, 2 ** 63 + 5, 1.25)

    def test_empty(self, tmp_path):
        path = write_records([], tmp_path / "r.csv")
        assert path.read_text() == ",".join(HEADER) + "\n"

    def test_round_trip_and_order(self, tmp_path):
        recs = [self.rec(1, 0.2), self.rec(0, 0.2), self.rec(5, 0.1)]
        path = write_records(recs, tmp_path / "r.csv", manifest={"experiment": "me3"})
        back = read_records(path)
        assert [(r.gamma_over_p, r.realization) for r in back] == [(0.1, 5), (0.2, 0), (0.2, 1)]
        for r in back:
            assert float(f"{r.objective:.12g}") == float(f"{0.123456789012345:.12g}")
            assert r.seed == 2 ** 63 + 5 and r.steps == 17
        assert (tmp_path / "r.csv.json").exists()

    def test_byte_identical_except_wall_time(self, tmp_path):
        s = spec("me3", realizations=2)
        paths = [write_records(run_experiment(s), tmp_path / f"{i}.csv") for i in (0, 1)]
        strip = [[",".join(line.split(",")[:-1]) for line in p.read_text().splitlines()] for p in paths]
        assert strip[0] == strip[1]

    def test_probability_range(self):
        with pytest.raises(ValueError):
            RunRecord("me3", 0, 0.1, 0.5, 1.5, 1, 1, 0.0)

    def test_io_error(self, tmp_path):
        with pytest.raises(OSError):
            write_records([], tmp_path / "missing" / "r.csv")
