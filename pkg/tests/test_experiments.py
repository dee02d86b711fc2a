import numpy as np
import pytest

from holderlab.config import build_config
from holderlab.experiments import (ProbeFamily, run_conjecture_probe, sample_probe, verify_energy_finiteness,
                                   verify_part1, verify_part2, verify_sobolev)

SMALL_LADDER = [2 ** k for k in range(8, 15)]
LACUNARY = {"kind": "lacunary", "lambda": 4, "delta": 2.0 ** -12}


def params(command, **overrides):
    return build_config({"command": command, **overrides}).params


def small(command, **overrides):
    base = {"embedding": LACUNARY, "samples": 4}
    if command in ("verify-part1", "verify-part2", "conjecture-probe"):
        base.update(ladder=SMALL_LADDER, window=None, levels=16)
    if command in ("verify-part2", "conjecture-probe"):
        base.update(slice_n=2 ** 12)
    base.update(overrides)
    return params(command, **base)


def zeros(d=15):
    return [[0.0] * d]


def test_sample_probe_degenerate_ball():
    t = sample_probe([0.5, -1.0], 1e-300, 1, 0)
    assert np.allclose(t, [[0.5, -1.0]], atol=1e-200)


def test_sample_probe_deterministic():
    assert np.array_equal(sample_probe(np.zeros(4), 1.0, 10, 9), sample_probe(np.zeros(4), 1.0, 10, 9))
    assert not np.array_equal(sample_probe(np.zeros(4), 1.0, 10, 9), sample_probe(np.zeros(4), 1.0, 10, 8))


def test_sample_probe_means():
    t = sample_probe(np.zeros(3), 1.0, 10 ** 4, 0)
    assert t.shape == (10 ** 4, 3)
    assert np.all(np.abs(t.mean(axis=0)) <= 0.02)
    assert np.all(np.abs(t) <= 1.0)


def test_probe_family_grid_values_match_function():
    fam = ProbeFamily(small("verify-part1"))
    t = fam.ts[1]
    f = fam.function(t)
    assert np.allclose(fam.closed(t, 512), f.on_grid(512), atol=1e-12)
    assert np.allclose(fam.midpoints(t, 512), f.at_midpoints(512), atol=1e-12)


def test_probe_family_rejects_wrong_dimension():
    with pytest.raises(ValueError):
        ProbeFamily(small("verify-part1", t=[[0.0, 1.0]]))


def test_part1_zero_control_fails():
    rep = verify_part1(small("verify-part1", function={"kind": "zero"}, t=zeros()))
    assert rep.summary["pass_fraction"] == 0.0
    assert rep.tables["samples"].rows[0][1] == pytest.approx(1.0, abs=0.05)


def test_part1_line_control_passes():
    rep = verify_part1(small("verify-part1", function={"kind": "linear"}, t=zeros()))
    assert rep.summary["pass_fraction"] == 1.0
    assert abs(rep.tables["samples"].rows[0][1]) < 0.1


def test_part1_rejects_large_alpha():
    with pytest.raises(ValueError, match="alpha"):
        verify_part1(small("verify-part1", alpha=0.6))


def test_part1_pass_fraction_monotone_in_tolerance():
    p = small("verify-part1", samples=6)
    fractions = []
    for tol in (0.2, 0.1, 0.0, -0.1, -0.3):  # negative slack goes past the config domain on purpose
        fractions.append(verify_part1({**p, "tolerance": tol}).summary["pass_fraction"])
    assert fractions[0] == 1.0 and fractions[-1] < 1.0
    assert all(b <= a for a, b in zip(fractions, fractions[1:]))


def test_part1_reports_surrogate_parameters():
    rep = verify_part1(small("verify-part1"))
    for key in ("samples", "rho", "ladder", "tolerance"):
        assert key in rep.summary
    assert "almost" not in str(rep.summary).lower()


def test_part2_line_control():
    rep = verify_part2(small("verify-part2", function={"kind": "linear"}, t=zeros()))
    assert rep.tables["samples"].rows[0][1] == pytest.approx(0.0, abs=1e-12)


def test_part2_zero_control_excluded():
    rep = verify_part2(small("verify-part2", function={"kind": "zero"}, t=zeros()))
    assert rep.summary["counted_samples"] == 0 and rep.summary["degenerate_samples"] == 1


def test_sobolev_controls():
    atom = verify_sobolev(small("verify-sobolev", function={"kind": "zero"}, t=zeros(), n=2 ** 12, beta=0.5))
    assert abs(atom.tables["samples"].rows[0][1]) < 1e-6 and atom.summary["pass_fraction"] == 0.0
    line = verify_sobolev(small("verify-sobolev", function={"kind": "linear"}, t=zeros(), n=2 ** 12, beta=0.5))
    assert line.tables["samples"].rows[0][1] == pytest.approx(2.0, abs=0.3)
    assert line.tables["samples"].rows[0][1] > 1.5


def test_energy_line_controls_diverge():
    for kind in ("zero", "linear"):
        rep = verify_energy_finiteness(small("verify-energy", function={"kind": kind}, t=zeros(),
                                             n=2 ** 10, graph_ladder=None))
        assert rep.summary["divergence_flags"] == 1
        assert not rep.summary["stable"]


def test_conjecture_probe_seed_specimen_and_determinism():
    p = small("conjecture-probe", budget=1, samples=2, m=2, working_n=256, grids=[256, 1024], levels=8)
    a = run_conjecture_probe(p)
    b = run_conjecture_probe(p)
    assert a.summary == b.summary
    assert a.summary["search_trace_initial"] == a.summary["search_trace_final"]
    assert a.summary["conditional_on_certificate"]
    assert [r[0] for r in a.tables["certificate_trace"].rows] == [256, 1024]


def test_threads_do_not_change_results():
    p = small("verify-part1")
    assert verify_part1(p, threads=1).tables == verify_part1(p, threads=3).tables
