"""Smoke test for the hallmhd extension module.

Build and install first:

    pip install --no-build-isolation -e crates/python
    python3 python/smoke_test.py
"""

import math
import os
import tempfile

import hallmhd


def main():
    p = hallmhd.PhysParams(0.1, 0.1, 1.0)

    s = hallmhd.State.scenario("zero_mv", "hall25d", 2, 32, p, seed=3)
    assert s.model == "hall25d" and s.n == 32
    assert s.component_names() == ["u1", "u2", "u3", "b1", "b2", "b3"]
    assert len(s.component("b3")) == 32 * 32
    assert hallmhd.hall_cancellation_residual(s, p) < 1e-10

    e0 = s.energy()
    s1 = s.step(p, 1e-3)
    assert abs(s1.time - 1e-3) < 1e-15
    e1 = s1.energy()
    assert e1["energy_u"] + e1["energy_b"] <= e0["energy_u"] + e0["energy_b"]

    final, records = hallmhd.run(s, p, t_end=0.05, diag_interval=0.01)
    assert len(records) == 6
    assert abs(final.time - 0.05) < 1e-12
    balance = [r["energy_balance"] for r in records]
    assert max(abs(b - balance[0]) for b in balance) < 1e-4 * balance[0]

    with tempfile.TemporaryDirectory() as d:
        path = os.path.join(d, "state.ckpt")
        final.save(path, p)
        back, q = hallmhd.State.load(path)
        assert back.time == final.time and q.nu == p.nu
        assert back.component("b1") == final.component("b1")

    assert abs(hallmhd.beta_convolution_bound(0.5, 0.5) - math.pi) < 1e-8
    fitted, expected = hallmhd.verify_splitting_decay(0.0)
    assert abs(fitted - expected) < 0.05

    passed, line = hallmhd.run_criterion("A8")
    print(line)
    assert passed

    print("smoke test passed")


if __name__ == "__main__":
    main()
