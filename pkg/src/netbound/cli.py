"""Command-line front end: analyze | certify | validate.

Each subcommand takes a network-spec file and an output directory.  Exit
codes: 0 success, 1 precondition or parse failure, 2 certified bound refuted
by simulation.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import certificate as cert_mod
from . import netspec as spec_mod
from .digraph import ConnectivityVerdict, check_assumption_connectivity, decompose
from .matrixlab import follower_lyapunov, leader_lyapunov
from .nodes import verify_semipassive
from .simulator import validate_certificate, write_csv

EXIT_OK = 0
EXIT_PRECONDITION = 1
EXIT_REFUTED = 2

_VERIFY_GRID = 10_000
_VERIFY_SPAN = 10.0  # verify over [-10 rho, 10 rho]


def _load(args) -> tuple[spec_mod.NetworkSpec, Path]:
    spec = spec_mod.load_network_spec(args.spec)
    analysis = spec.analysis
    if args.seed is not None:
        analysis = replace(analysis, seed=args.seed)
    if args.dt is not None:
        analysis = replace(analysis, dt=args.dt)
    if args.horizon is not None:
        analysis = replace(analysis, horizon=args.horizon)
    spec = replace(spec, analysis=analysis)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    spec_mod.save_network_spec(spec, out / "network_spec.json")
    return spec, out


def _ones(indices) -> str:
    return "[" + ", ".join(str(i + 1) for i in indices) + "]"


def _matrix(M: np.ndarray) -> str:
    return np.array2string(np.asarray(M), precision=6, suppress_small=True)


def _analyze_text(spec: spec_mod.NetworkSpec) -> str:
    graph = spec_mod.build_graph(spec)
    dec = decompose(graph)
    lead = leader_lyapunov(dec.L_ell)
    lines = [
        "network decomposition report",
        "============================",
        f"n = {graph.n}: leaders {_ones(dec.leaders)}, followers {_ones(dec.followers)}",
        f"permutation (new -> original, 1-based): {_ones(dec.permutation)}",
        "",
        "L_ell =",
        _matrix(dec.L_ell),
        f"v_o = {_matrix(lead.v_o)}",
        f"lambda_2(Q_o) = {lead.lambda2_Qo:.6g}",
    ]
    if dec.n_f:
        fol = follower_lyapunov(dec.M_f)
        lines += [
            "",
            "A_lf =",
            _matrix(dec.A_lf),
            "M_f =",
            _matrix(dec.M_f),
            f"P diagonal = {_matrix(np.diagonal(fol.P))}",
            f"lambda_1(S) = {fol.lambda1_S:.6g}",
        ]
    else:
        lines += ["", "no followers: the whole graph is strongly connected"]
    return "\n".join(lines) + "\n"


def cmd_analyze(args) -> int:
    spec, out = _load(args)
    graph = spec_mod.build_graph(spec)
    verdict = check_assumption_connectivity(graph)
    if verdict is not ConnectivityVerdict.OK:
        print(f"error: graph has no directed spanning tree: {verdict.value}", file=sys.stderr)
        return EXIT_PRECONDITION
    text = _analyze_text(spec)
    (out / "report.txt").write_text(text)
    print(text, end="")
    return EXIT_OK


def _gatekeep_nodes(spec: spec_mod.NetworkSpec):
    """Build nodes and verify each one's dissipation certificate."""
    nodes = spec_mod.build_nodes(spec)
    for node_spec, node in zip(spec.nodes, nodes):
        result = verify_semipassive(node, _VERIFY_SPAN * node.rho, _VERIFY_GRID)
        if not result.ok:
            raise spec_mod.SpecFormatError(
                f"node {node_spec.id} ({node.name}) failed dissipation verification: "
                f"{result.check} at witness x = {result.witness:.6g}"
            )
    return nodes


def _certify(spec: spec_mod.NetworkSpec):
    graph = spec_mod.build_graph(spec)
    verdict = check_assumption_connectivity(graph)
    if verdict is not ConnectivityVerdict.OK:
        raise spec_mod.SpecFormatError(f"graph has no directed spanning tree: {verdict.value}")
    nodes = _gatekeep_nodes(spec)
    inputs = cert_mod.certificate_inputs(
        graph, nodes, spec.analysis.gamma_o, spec.analysis.r_o, spec.analysis.epsilon
    )
    return graph, nodes, inputs, cert_mod.compute_certificate(inputs)


def cmd_certify(args) -> int:
    spec, out = _load(args)
    try:
        _, _, inputs, cert = _certify(spec)
    except (spec_mod.SpecFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    uniformity = cert_mod.check_uniformity(inputs)
    (out / "certificate.kv").write_text(cert.to_kv_lines())
    text = cert_mod.format_certificate(cert) + "\nuniformity checks:\n" + uniformity.summary() + "\n"
    (out / "certificate.txt").write_text(text)
    print(text, end="")
    return EXIT_OK if uniformity.ok else EXIT_PRECONDITION


_PLOT_SCRIPT = """\
# gnuplot script: plot the exported trajectories
set datafile separator ","
set key autotitle columnhead
set xlabel "t"
set ylabel "x_i(t)"
plot for [i=2:{ncols}] "{first}" using 1:i with lines
"""


def cmd_validate(args) -> int:
    spec, out = _load(args)
    try:
        graph, nodes, inputs, cert = _certify(spec)
    except (spec_mod.SpecFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    x0s = spec_mod.sample_initial_conditions(spec)
    try:
        report = validate_certificate(
            cert, nodes, graph, spec.analysis.gamma_list, x0s,
            horizon=spec.analysis.horizon, dt=spec.analysis.dt,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION

    first_csv = None
    for run in report.runs:
        name = f"traj_{run.gamma:g}_{run.ic_index}.csv"
        write_csv(run.trajectory, out / name)
        first_csv = first_csv or name
    (out / "certificate.kv").write_text(cert.to_kv_lines())
    (out / "certificate.txt").write_text(cert_mod.format_certificate(cert))
    (out / "report.kv").write_text(report.to_kv_lines())
    text = cert_mod.format_certificate(cert) + "\n" + report.to_text()
    if report.verdict == "inconclusive":
        text += f"\ninconclusive: rerun with horizon > {report.required_horizon:.6g}\n"
    (out / "report.txt").write_text(text)
    if first_csv:
        (out / "plot.gp").write_text(_PLOT_SCRIPT.format(ncols=graph.n + 1, first=first_csv))
    print(text, end="")
    return EXIT_REFUTED if report.verdict == "refuted" else EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netbound",
        description="Certify and validate boundedness of coupled semi-passive networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn, doc in (
        ("analyze", cmd_analyze, "decompose the network and report the Lyapunov data"),
        ("certify", cmd_certify, "compute the full bound certificate"),
        ("validate", cmd_validate, "cross-check the certificate against simulations"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("spec", help="path to the network-spec JSON file")
        p.add_argument("--out", default="out", help="output directory (default: ./out)")
        p.add_argument("--seed", type=int, default=None, help="override analysis.seed")
        p.add_argument("--dt", type=float, default=None, help="override analysis.dt")
        p.add_argument("--horizon", type=float, default=None, help="override analysis.horizon")
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except spec_mod.SpecFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


def entry() -> None:  # console-script shim
    sys.exit(main())


if __name__ == "__main__":
    entry()
