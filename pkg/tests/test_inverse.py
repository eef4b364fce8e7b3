import numpy as np
import pytest

from degenflux.forward import ProblemConfig, flux_profile, measure, time_grid
from degenflux.inverse import (
    AdmissibleBox,
    ObjectiveSpec,
    noise_study,
    objective_eval,
    reconstruct,
    write_noise_csv,
)
from degenflux.quadrature import InitialData

TRUTH = ProblemConfig(
    theta=1.5, a=0.5, alpha=1.0, beta=1.0, initial=InitialData.constant(1.0, 1.0)
)
KNOWN = InitialData.constant(1.0, 1.0)
BOX_A = AdmissibleBox(lower=(0.02,), upper=(0.98,))


def _point_spec(record=None):
    record = record or measure(TRUTH, np.array([1.99]), sides=(1,))
    return ObjectiveSpec(
        kind="point", measurement=record, theta=1.5, alpha=1.0, beta=1.0, initial=KNOWN
    )


def test_box_validation():
    with pytest.raises(ValueError):
        AdmissibleBox(lower=(0.5,), upper=(0.5,))
    with pytest.raises(ValueError):
        AdmissibleBox(lower=(0.01,), upper=(0.9,))
    with pytest.raises(ValueError):
        AdmissibleBox(lower=(0.1,), upper=(0.99,))
    with pytest.raises(ValueError):
        AdmissibleBox(lower=(), upper=())
    box = AdmissibleBox(lower=(0.1, -5.0), upper=(0.9, 5.0))
    assert box.dim == 2
    assert list(box.widths) == [0.8, 10.0]
    assert list(box.clip([0.0, 7.0])) == [0.1, 5.0]


def test_objective_spec_validation():
    record = measure(TRUTH, np.array([0.5, 1.0]), sides=(1,))
    with pytest.raises(ValueError):
        ObjectiveSpec(kind="bogus", measurement=record, theta=1.5, alpha=1.0, beta=1.0)
    # two-sided needs records at both boundaries
    with pytest.raises(ValueError):
        ObjectiveSpec(kind="two-sided", measurement=record, theta=1.5, alpha=1.0, beta=1.0)
    # point and interval-u need the known data
    with pytest.raises(ValueError):
        ObjectiveSpec(kind="interval-u", measurement=record, theta=1.5, alpha=1.0, beta=1.0)
    # fixed-left needs the pinned value
    with pytest.raises(ValueError):
        ObjectiveSpec(kind="fixed-left", measurement=record, theta=1.5, alpha=1.0, beta=1.0)
    # point wants exactly one sample
    with pytest.raises(ValueError):
        ObjectiveSpec(
            kind="point", measurement=record, theta=1.5, alpha=1.0, beta=1.0, initial=KNOWN
        )
    two = measure(TRUTH, np.array([0.5, 1.0]), sides=(0, 1))
    with pytest.raises(ValueError):
        ObjectiveSpec(kind="one-sided", measurement=two, theta=1.5, alpha=1.0, beta=1.0)


def test_config_for_shapes():
    record = measure(TRUTH, np.array([0.5, 1.0]), sides=(1,))
    spec = ObjectiveSpec(kind="interval-uv", measurement=record, theta=1.5, alpha=1.0, beta=1.0)
    cfg = spec.config_for([0.4, 1.5, -2.0])
    assert cfg.a == 0.4
    assert cfg.initial.u0(0.2, 0.4) == 1.5
    assert cfg.initial.v0(0.2, 0.4) == -2.0
    with pytest.raises(ValueError):
        spec.config_for([0.4])
    fl = ObjectiveSpec(
        kind="fixed-left", measurement=record, theta=1.5, alpha=1.0, beta=1.0, u_left=1.0
    )
    cfg = fl.config_for([0.4, 2.0])
    assert cfg.initial.u0(0.2, 0.4) == 1.0
    assert cfg.initial.u0(0.7, 0.4) == 2.0
    assert cfg.initial.v0(0.7, 0.4) == 0.0


def test_objective_vanishes_at_truth():
    spec = _point_spec()
    assert objective_eval(spec, np.array([0.5])) <= 1e-20
    far = objective_eval(spec, np.array([0.1]))
    assert far > 0.0
    assert objective_eval(spec, np.array([0.5])) <= 1e-10 * far


def test_one_sided_objective_invariant_in_left_value():
    ts = time_grid(0.0, 2.0, 60)
    truth = ProblemConfig(
        theta=1.5, a=0.5, alpha=1.0, beta=1.0, initial=InitialData.piecewise(1.0, 2.0, 0.0, 0.0)
    )
    record = measure(truth, ts, sides=(1,))
    spec = ObjectiveSpec(kind="one-sided", measurement=record, theta=1.5, alpha=1.0, beta=1.0)
    at = objective_eval(spec, np.array([0.45, 1.0, 1.8]))
    shifted = objective_eval(spec, np.array([0.45, 2.0, 1.8]))
    assert abs(at - shifted) <= 1e-12


def test_reconstruct_point_noiseless():
    result = reconstruct(_point_spec(), BOX_A, [0.1])
    assert abs(result.params[0] - 0.5) <= 1e-6
    assert result.cost <= 1e-15
    assert result.status == "converged"
    assert result.iterations <= 400


def test_reconstruct_quasi_newton_matches():
    # init on the convex side of the basin; from 0.1 the downhill path ends
    # at the box edge (the single-sample landscape has a hump near a = 0.12)
    result = reconstruct(_point_spec(), BOX_A, [0.3], optimizer="quasi-newton")
    assert abs(result.params[0] - 0.5) <= 1e-6


def test_trace_costs_non_increasing():
    result = reconstruct(_point_spec(), BOX_A, [0.1])
    costs = [c for _, _, c in result.trace]
    assert all(b <= a for a, b in zip(costs, costs[1:]))
    evals = [i for i, _, _ in result.trace]
    assert all(b > a for a, b in zip(evals, evals[1:]))
    assert result.iterations >= evals[-1]


def test_reconstruct_validation():
    spec = _point_spec()
    with pytest.raises(ValueError):
        reconstruct(spec, AdmissibleBox(lower=(0.02, -1.0), upper=(0.98, 1.0)), [0.1, 0.0])
    with pytest.raises(ValueError):
        reconstruct(spec, BOX_A, [0.1, 0.2])
    with pytest.raises(ValueError):
        reconstruct(spec, BOX_A, [0.005])
    with pytest.raises(ValueError):
        reconstruct(spec, BOX_A, [0.1], optimizer="annealing")


def test_reconstruct_iteration_cap():
    result = reconstruct(_point_spec(), BOX_A, [0.1], max_evals=5)
    assert result.iterations == 5
    assert result.status in ("iteration-cap", "flat-direction(0)")


def test_result_dict_schema():
    result = reconstruct(_point_spec(), BOX_A, [0.1])
    d = result.to_dict()
    assert set(d) == {"kind", "params", "cost", "iterations", "status", "trace"}
    assert set(d["trace"][0]) == {"eval", "params", "cost"}
    assert set(result.to_dict(include_trace=False)) == {
        "kind",
        "params",
        "cost",
        "iterations",
        "status",
    }


def test_single_component_distributed_reconstruction():
    ts = time_grid(0.0, 4.0, 200)
    record = measure(TRUTH, ts, sides=(1,))
    spec = ObjectiveSpec(
        kind="interval-u", measurement=record, theta=1.5, alpha=1.0, beta=1.0, initial=KNOWN
    )
    result = reconstruct(spec, BOX_A, [0.1])
    assert abs(result.params[0] - 0.5) <= 1e-5


def test_noise_study_schema_and_determinism(tmp_path):
    ts = time_grid(0.0, 2.0, 40)
    kw = dict(base_seed=5, known_initial=KNOWN)
    rows = noise_study(TRUTH, "interval-u", ts, (1,), BOX_A, [0.1], [1.0, 0.0], **kw)
    again = noise_study(TRUTH, "interval-u", ts, (1,), BOX_A, [0.1], [1.0, 0.0], **kw)
    assert rows == again
    assert [r[0] for r in rows] == [1.0, 0.0]
    assert abs(rows[1][3] - 0.5) <= 1e-6
    path = tmp_path / "noise.csv"
    write_noise_csv(path, rows)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "percent,cost,iterations,a_c"
    assert len(lines) == 3


def test_uniqueness_witness_sample(rng):
    # distinct constant-data problems produce distinct two-sided records
    ts = time_grid(0.5, 2.5, 16)
    for _ in range(5):
        a1, a2 = rng.uniform(0.2, 0.8, 2)
        if abs(a1 - a2) < 0.01:
            a2 = a1 + 0.05
        cu1, cv1, cu2, cv2 = rng.uniform(0.5, 2.0, 4)
        c1 = ProblemConfig(
            theta=1.5, a=float(a1), alpha=1.0, beta=1.0, initial=InitialData.constant(cu1, cv1)
        )
        c2 = ProblemConfig(
            theta=1.5, a=float(a2), alpha=1.0, beta=1.0, initial=InitialData.constant(cu2, cv2)
        )
        misfit = 0.0
        for side in (0, 1):
            du1, dv1 = flux_profile(c1, side, ts)
            du2, dv2 = flux_profile(c2, side, ts)
            misfit += float(np.trapezoid((du1 - du2) ** 2 + (dv1 - dv2) ** 2, ts))
        assert misfit >= 1e-10
