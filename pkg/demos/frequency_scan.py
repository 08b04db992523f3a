"""Stiffen the trap and watch the gas remember more.

A tighter trap (larger omega) spaces the single-particle levels further
apart, so the gas rephases faster and more completely within a fixed
observation window.  N_V grows with omega; the loose-trap limit
approaches a free gas, which forgets monotonically.
"""

import math

from fermi_echo import RunSpec, SweepSpec, TimeGrid, TrapGasConfig, sweep


def main() -> None:
    base = RunSpec(
        gas=TrapGasConfig(omega=0.5, n_fermions=40, beta=3.0),
        alpha=0.05,
        # one shared absolute horizon, so every trap sees the same
        # physical observation time
        grid=TimeGrid(t_max=20 * math.pi, n_steps=2000),
    )
    records = sweep(SweepSpec(base=base, axis="omega", values=(0.5, 1.0, 2.0)))

    print(f"{'omega':>6} {'N_V':>10} {'expansions':>11}")
    for record in records:
        print(
            f"{record.spec.gas.omega:6.2f}"
            f" {record.report.n_v:10.4f}"
            f" {len(record.report.expansion_intervals):11d}"
        )


if __name__ == "__main__":
    main()
