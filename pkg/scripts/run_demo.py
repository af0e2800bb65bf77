#!/usr/bin/env python3
"""End-to-end demo: decompose, certify, and validate a shipped network.

Programmatic equivalent of

    netbound validate networks/bistable_demo.json --out out/demo

with a compact margins summary printed at the end.
"""

import argparse
import sys
import time
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from netbound import (  # noqa: E402
    build_graph,
    build_nodes,
    certificate_inputs,
    compute_certificate,
    format_certificate,
    load_network_spec,
    sample_initial_conditions,
    validate_certificate,
    verify_semipassive,
    write_csv,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("spec", nargs="?", default=str(REPO / "networks" / "bistable_demo.json"))
    parser.add_argument("--out", default="out/demo")
    args = parser.parse_args()

    spec = load_network_spec(args.spec)
    graph = build_graph(spec)
    nodes = build_nodes(spec)
    for node_spec, node in zip(spec.nodes, nodes):
        result = verify_semipassive(node, 10.0 * node.rho, 10_000)
        if not result.ok:
            print(f"node {node_spec.id} fails verification: {result.detail}")
            return 1

    inputs = certificate_inputs(
        graph, nodes, spec.analysis.gamma_o, spec.analysis.r_o, spec.analysis.epsilon
    )
    cert = compute_certificate(inputs)
    print(format_certificate(cert))

    x0s = sample_initial_conditions(spec)
    start = time.perf_counter()
    report = validate_certificate(
        cert, nodes, graph, spec.analysis.gamma_list, x0s,
        horizon=spec.analysis.horizon, dt=spec.analysis.dt,
    )
    elapsed = time.perf_counter() - start
    print(f"validated {len(report.runs)} runs in {elapsed:.1f} s -> {report.verdict}")

    worst: dict = {}
    for run in report.runs:
        for chk in run.checks:
            if chk.verdict == "pass":
                prev = worst.get(chk.name)
                if prev is None or chk.margin < prev.margin:
                    worst[chk.name] = chk
    print("tightest margins over all runs:")
    for name, chk in sorted(worst.items()):
        print(f"  {name:<22} bound {chk.bound:>9.4g}   worst empirical sup {chk.empirical_sup:>9.4g}"
              f"   margin {chk.margin:>9.4g}")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for run in report.runs:
        write_csv(run.trajectory, out / f"traj_{run.gamma:g}_{run.ic_index}.csv")
    (out / "certificate.kv").write_text(cert.to_kv_lines())
    (out / "report.txt").write_text(report.to_text())
    print(f"wrote trajectories and report to {out}/")
    return 0 if report.verdict == "pass" else 2


if __name__ == "__main__":
    sys.exit(main())
