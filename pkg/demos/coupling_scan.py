"""Scan the impurity coupling and watch non-Markovianity saturate.

The dimensionless coupling alpha fixes the contact strength through
v0 = sqrt(alpha * omega * e_fermi).  Weak coupling barely disturbs the
gas, so volume revivals are tiny and N_V is small.  Strong coupling
scrambles the gas so thoroughly that the revivals stop growing, and the
memory measure levels off instead of increasing without bound.
"""

import math

from fermi_echo import RunSpec, SweepSpec, TimeGrid, TrapGasConfig, sweep


def main() -> None:
    # saturation needs room: a truncated basis inflates N_V at strong
    # coupling, so keep the cutoff generous relative to n_fermions
    base = RunSpec(
        gas=TrapGasConfig(omega=1.0, n_fermions=40, beta=3.0, cutoff=400),
        alpha=0.001,
        grid=TimeGrid(t_max=20 * math.pi, n_steps=2000),
    )
    spec = SweepSpec(
        base=base,
        axis="alpha",
        values=(0.001, 0.01, 0.05, 0.1, 0.2, 0.5),
    )
    records = sweep(spec)

    print(f"{'alpha':>8} {'N_V':>10} {'final R':>10}")
    for record in records:
        ratio = record.report.ratio[-1]
        print(f"{record.spec.alpha:8.3f} {record.report.n_v:10.4f} {ratio:10.4f}")


if __name__ == "__main__":
    main()
