r"""Command-line front end.

Subcommands: ``theta``, ``eta``, ``lll``, ``matrices``, ``partition``,
``squeeze``, ``verify``.  All reports are JSON on stdout (sorted keys,
floats rendered with 17 significant digits, complex values as
``{"im": ..., "re": ...}``, LF line endings); the ``lll`` subcommand
additionally writes per-state CSV grids and an eigenphase table into
the output directory.  Identical configurations produce byte-identical
output (the per-check wall times inside ``verify`` reports are the one
documented exception).

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O
error.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from .core import (
    Flux,
    ModularParameter,
    VacuumAngles,
    complex_structure_from_tau,
    squeeze_from_tau,
    squeeze_roundtrip_residual,
)
from .errors import DegenerateDeformationError
from .fields import (
    dual_commutation_residual,
    plaquette_phase,
    sine_bracket_residual,
)
from .lll import (
    build_basis,
    center_eigen_residual,
    eigenphase_table,
    gram_rank,
    unit_cell_grid,
)
from .matrices import (
    WeylWord,
    bimodule_consistency,
    clock_matrix,
    commutant_dimension,
    dual_matrices,
    q_commutation_residual,
    shift_matrix,
    sine_structure_residual,
    uq_sl2_generators,
    weyl_element,
    weyl_span_dimension,
)
from .partition import QuadratureSpec, modular_invariance_report, z_tilde, z_tilde_character_route
from .theta import ThetaSpec, TruncationPolicy, dedekind_eta, orthogonality_residual, theta, truncation_bound

__all__ = ["RunConfig", "main", "parse_complex"]


class UsageError(ValueError):
    pass


def parse_complex(text: str) -> complex:
    """Parse ``a+bi`` flag syntax (``i`` alone means 1i)."""
    s = text.strip().replace(" ", "")
    if not s:
        raise UsageError("empty complex literal")
    try:
        return complex(s.replace("i", "j").replace("I", "j"))
    except ValueError:
        raise UsageError("cannot parse complex literal %r" % text) from None


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters shared by the subcommands."""

    m: int = 3
    n: int = 2
    tau: complex = 0.3 + 1.1j
    alpha1: float = 0.0
    alpha2: float = 0.0
    epsilon: float = 1e-12
    grid: int = 6
    quad_nodes: int = 64
    output_dir: str = "."

    def __post_init__(self):
        Flux(self.n, self.m)  # validates positivity and coprimality
        ModularParameter(self.tau.real, self.tau.imag)
        TruncationPolicy(epsilon=self.epsilon)
        if self.grid < 2:
            raise UsageError("--grid must be at least 2")
        QuadratureSpec(nodes_per_axis=self.quad_nodes)

    @property
    def flux(self) -> Flux:
        return Flux(self.n, self.m)

    @property
    def angles(self) -> VacuumAngles:
        return VacuumAngles(self.alpha1, self.alpha2)

    @property
    def policy(self) -> TruncationPolicy:
        return TruncationPolicy(epsilon=self.epsilon)

    def as_report(self) -> dict:
        return {
            "M": self.m,
            "N": self.n,
            "tau": self.tau,
            "alpha1": self.alpha1,
            "alpha2": self.alpha2,
            "epsilon": self.epsilon,
            "grid": self.grid,
            "quad_nodes": self.quad_nodes,
            "output_dir": self.output_dir,
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return {"im": float(obj.imag), "re": float(obj.real)}
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _render(obj) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format(obj, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, list):
        return "[" + ",".join(_render(v) for v in obj) + "]"
    if isinstance(obj, dict):
        items = sorted(obj.items(), key=lambda kv: kv[0])
        return "{" + ",".join(json.dumps(k) + ":" + _render(v) for k, v in items) + "}"
    raise TypeError("cannot render %r" % type(obj))


def emit_json(obj, stream=None) -> str:
    """Serialize deterministically (sorted keys, %.17g floats) and print."""
    text = _render(_jsonable(obj)) + "\n"
    out = stream if stream is not None else sys.stdout
    out.write(text)
    return text


def _fmt17(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------- theta


def cmd_theta(args) -> int:
    level = args.level
    if level < 1:
        raise UsageError("--level must be positive")
    if not (0 <= args.residue < level):
        raise UsageError("--residue must lie in [0, level)")
    tau = ModularParameter(args.tau.real, args.tau.imag)
    policy = TruncationPolicy(epsilon=args.eps)
    spec = ThetaSpec(level, args.residue)
    value = theta(spec, args.z, tau, policy)
    n_max = truncation_bound(level, args.z, tau, args.eps)
    emit_json(
        {
            "certificate": {"epsilon": args.eps, "n_max": n_max},
            "config": {"level": level, "residue": args.residue, "tau": tau.value, "z": args.z},
            "value": complex(value),
        }
    )
    return 0


def cmd_eta(args) -> int:
    tau = ModularParameter(args.tau.real, args.tau.imag)
    value = dedekind_eta(tau, TruncationPolicy(epsilon=args.eps))
    emit_json({"config": {"epsilon": args.eps, "tau": tau.value}, "value": value})
    return 0


# ------------------------------------------------------------------ lll


def _write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def cmd_lll(cfg: RunConfig) -> int:
    basis = build_basis(cfg.flux, cfg.tau, cfg.angles, cfg.policy)
    n = cfg.grid
    s = np.arange(n) / n
    x = np.repeat(s, n)
    y = np.tile(s, n)
    w = x + cfg.tau * y
    wbar = np.conjugate(w)
    try:
        os.makedirs(cfg.output_dir, exist_ok=True)
        files = []
        for (j, k) in basis.labels():
            values = basis.states[(j, k)].evaluate(w, wbar)
            lines = ["x,y,re,im,abs2"]
            for i in range(w.size):
                v = values[i]
                lines.append(
                    ",".join(
                        _fmt17(t)
                        for t in (x[i], y[i], v.real, v.imag, abs(v) ** 2)
                    )
                )
            name = "psi_%d_%d.csv" % (j, k)
            _write_text(os.path.join(cfg.output_dir, name), "\n".join(lines) + "\n")
            files.append(name)
        table = eigenphase_table(basis)
        report = {
            "config": cfg.as_report(),
            "eigenphases": {
                "%d,%d" % lb: entry for lb, entry in table.items()
            },
        }
        for entry in report["eigenphases"].values():
            entry["d2_target"] = list(entry["d2_target"])
            entry["dual2_target"] = list(entry["dual2_target"])
        text = _render(_jsonable(report)) + "\n"
        _write_text(os.path.join(cfg.output_dir, "eigenphases.json"), text)
        files.append("eigenphases.json")
    except OSError as exc:
        print("I/O error: %s" % exc, file=sys.stderr)
        return 3
    emit_json({"config": cfg.as_report(), "files": files})
    return 0


# ------------------------------------------------------------- matrices


def cmd_matrices(cfg: RunConfig) -> int:
    m, n = cfg.m, cfg.n
    angles = cfg.angles
    clock = clock_matrix(m, n, angles.alpha1)
    shift = shift_matrix(m, angles.alpha2)
    dual_clock, dual_shift = dual_matrices(m, n, angles)
    cocycle_worst = 0.0
    for a1 in range(-2, 3):
        for a2 in range(-2, 3):
            for b1 in range(-2, 3):
                for b2 in range(-2, 3):
                    wa, wb = WeylWord(a1, a2), WeylWord(b1, b2)
                    lhs = (weyl_element(wa, m, n) @ weyl_element(wb, m, n)).entries
                    rhs = (
                        cmath.exp(1j * math.pi * n * wa.cross(wb) / m)
                        * weyl_element(wa + wb, m, n).entries
                    )
                    cocycle_worst = max(cocycle_worst, float(np.max(np.abs(lhs - rhs))))
    report = {
        "clock": clock.entries,
        "shift": shift.entries,
        "dual_clock": dual_clock.entries,
        "dual_shift": dual_shift.entries,
        "residuals": {
            "dual_q_commutation": q_commutation_residual(n, m, angles),
            "q_commutation": q_commutation_residual(m, n, angles),
            "sine_structure": sine_structure_residual(m, n, WeylWord(1, 0), WeylWord(0, 1)),
            "weyl_cocycle": cocycle_worst,
        },
        "commutant_dimension": commutant_dimension([clock, shift]),
        "weyl_span_dimension": weyl_span_dimension(m, n),
        "config": cfg.as_report(),
    }
    emit_json(report)
    return 0


# ------------------------------------------------------------ partition


def cmd_partition(cfg: RunConfig) -> int:
    quad = QuadratureSpec(nodes_per_axis=cfg.quad_nodes)
    basis = build_basis(cfg.flux, cfg.tau, cfg.angles, cfg.policy)
    za = z_tilde(basis, quad, cfg.policy)
    zb = z_tilde_character_route(basis, quad, cfg.policy)
    inv = modular_invariance_report(cfg.flux, cfg.angles, cfg.tau, quad, cfg.policy)
    emit_json(
        {
            "config": cfg.as_report(),
            "s_residual": inv.s_residual,
            "t_residual": inv.t_residual,
            "z_tilde": za,
            "z_tilde_character_route": zb,
        }
    )
    return 0


# -------------------------------------------------------------- squeeze


def cmd_squeeze(args) -> int:
    tau = ModularParameter(args.tau.real, args.tau.imag)
    sq = squeeze_from_tau(tau)
    j = complex_structure_from_tau(tau)
    emit_json(
        {
            "complex_structure": j.matrix,
            "config": {"tau": tau.value},
            "phi": sq.phi,
            "r": sq.r,
            "roundtrip_residual": squeeze_roundtrip_residual(tau),
        }
    )
    return 0


# --------------------------------------------------------------- verify


def _verify_checks(cfg: RunConfig, inject_fault: bool):
    """Yield (name, callable) pairs; each callable returns
    (residual, tolerance) or (residual, tolerance, note)."""
    flux = cfg.flux
    m, n = cfg.m, cfg.n
    tau = ModularParameter(cfg.tau.real, cfg.tau.imag)
    angles = cfg.angles
    policy = cfg.policy
    quad = QuadratureSpec(nodes_per_axis=cfg.quad_nodes)

    def theta_quasi_periodicity():
        # residuals relative to the magnitude of the reference side (the
        # tau-shift factor has modulus e^{pi K b}, so absolute residuals
        # would be meaningless at higher level)
        rng = np.random.default_rng(0)
        worst = 0.0
        for level in (1, 2, 3, 6, 12):
            spec = ThetaSpec(level, level // 2)
            zs = rng.random(25) + tau.value * rng.random(25)
            f = theta(spec, zs, tau, policy)
            r1 = np.max(np.abs(theta(spec, zs + 1.0, tau, policy) - f))
            worst = max(worst, float(r1 / np.max(np.abs(f))))
            factor = np.exp(-1j * math.pi * level * tau.value - 2j * math.pi * level * zs)
            rhs = factor * f
            r2 = np.max(np.abs(theta(spec, zs + tau.value, tau, policy) - rhs))
            worst = max(worst, float(r2 / np.max(np.abs(rhs))))
        return worst, 1e-9

    def eta_functional_equations():
        rng = np.random.default_rng(0)
        worst = 0.0
        for _ in range(20):
            t = ModularParameter(rng.uniform(-0.5, 0.5), rng.uniform(1.0, 2.5))
            e = dedekind_eta(t, policy)
            shifted = dedekind_eta(ModularParameter(t.re + 1.0, t.im), policy)
            worst = max(worst, abs(shifted - cmath.exp(1j * math.pi / 12.0) * e))
            inv = -1.0 / t.value
            e_inv = dedekind_eta(ModularParameter(inv.real, inv.imag), policy)
            worst = max(worst, abs(e_inv - cmath.sqrt(-1j * t.value) * e))
        return worst, 1e-10

    def q_commutation_matrix():
        c = clock_matrix(m, n, angles.alpha1).entries
        s = shift_matrix(m, angles.alpha2).entries
        sign = -1.0 if inject_fault else 1.0
        q = cmath.exp(sign * 2j * math.pi * (n % m) / m)
        res = float(np.max(np.abs(c @ s - q * (s @ c))))
        note = "cocycle sign deliberately flipped" if inject_fault else None
        return res, 1e-13, note

    def weyl_cocycle_matrix():
        worst = 0.0
        for a1 in range(-2, 3):
            for a2 in range(-2, 3):
                for b1 in range(-2, 3):
                    for b2 in range(-2, 3):
                        wa, wb = WeylWord(a1, a2), WeylWord(b1, b2)
                        lhs = (weyl_element(wa, m, n) @ weyl_element(wb, m, n)).entries
                        rhs = (
                            cmath.exp(1j * math.pi * n * wa.cross(wb) / m)
                            * weyl_element(wa + wb, m, n).entries
                        )
                        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        return worst, 1e-12

    def sine_algebra_matrix():
        worst = max(
            sine_structure_residual(m, n, WeylWord(1, 0), WeylWord(0, 1)),
            sine_structure_residual(m, n, WeylWord(1, 1), WeylWord(2, -1)),
        )
        return worst, 1e-12

    def sine_algebra_operator():
        return sine_bracket_residual((1, 0), (0, 1), flux, tau), 1e-9

    def dual_commutation_operator():
        return dual_commutation_residual((1, 0), (0, 1), flux, tau), 1e-9

    def holonomy_operator():
        phase, spread = plaquette_phase(flux, tau)
        res = max(abs(phase - cmath.exp(2j * math.pi * n / m)), spread)
        return res, 1e-10

    def holonomy_matrix():
        c = clock_matrix(m, n, angles.alpha1)
        s = shift_matrix(m, angles.alpha2)
        hol = (c @ s @ c.adjoint() @ s.adjoint()).entries
        return float(
            np.max(np.abs(hol - cmath.exp(2j * math.pi * n / m) * np.eye(m)))
        ), 1e-10

    basis_holder = {}

    def _basis():
        if "b" not in basis_holder:
            basis_holder["b"] = build_basis(flux, tau, angles, policy)
        return basis_holder["b"]

    def center_eigenvalues():
        basis = _basis()
        worst = max(
            center_eigen_residual(basis, j, k) for (j, k) in basis.labels()
        )
        return worst, 1e-10

    def lemma_eigenphases():
        basis = _basis()
        table = eigenphase_table(basis)
        worst = 0.0
        for (j, k), entry in table.items():
            want1 = cmath.exp(1j * (angles.alpha1 - 2 * math.pi * j * n) / m)
            worst = max(worst, abs(entry["d1_phase"] - want1), entry["d1_spread"])
            if entry["d2_target"] != ((j - 1) % m, k):
                worst = max(worst, 1.0)
            worst = max(worst, abs(entry["d2_phase"] - cmath.exp(1j * angles.alpha2 / m)))
        return worst, 1e-7

    def gram_rank_check():
        return float(abs(gram_rank(_basis()) - m * n)), 0.5

    def bimodule_check():
        report = bimodule_consistency(_basis(), grid=unit_cell_grid(tau, n=6))
        res = max(max(report["deviations"].values()), report["left_right_commutator"])
        return res, 1e-6

    def commutant_check():
        dim = commutant_dimension(
            [clock_matrix(m, n, angles.alpha1), shift_matrix(m, angles.alpha2)]
        )
        span = weyl_span_dimension(m, n)
        return float(abs(dim - 1) + abs(span - m * m)), 0.5

    def uq_sl2_check():
        try:
            gens = uq_sl2_generators(m, n)
        except DegenerateDeformationError:
            return 0.0, 1e-11, "skipped: degenerate deformation parameter"
        return max(gens.residuals.values()), 1e-11

    def orthogonality_check():
        worst = max(orthogonality_residual(m * n), orthogonality_residual(24))
        return worst, 1e-12

    invariance_holder = {}

    def _invariance():
        if "r" not in invariance_holder:
            invariance_holder["r"] = modular_invariance_report(
                flux, VacuumAngles(), tau, quad, policy
            )
        return invariance_holder["r"]

    def partition_t_invariance():
        return _invariance().t_residual, 1e-5

    def partition_s_invariance():
        return _invariance().s_residual, 1e-3

    return [
        ("theta_quasi_periodicity", theta_quasi_periodicity),
        ("eta_functional_equations", eta_functional_equations),
        ("q_commutation_matrix", q_commutation_matrix),
        ("weyl_cocycle_matrix", weyl_cocycle_matrix),
        ("sine_algebra_matrix", sine_algebra_matrix),
        ("sine_algebra_operator", sine_algebra_operator),
        ("dual_commutation_operator", dual_commutation_operator),
        ("holonomy_operator", holonomy_operator),
        ("holonomy_matrix", holonomy_matrix),
        ("center_eigenvalues", center_eigenvalues),
        ("lemma_eigenphases", lemma_eigenphases),
        ("gram_rank", gram_rank_check),
        ("bimodule_consistency", bimodule_check),
        ("commutant_and_span", commutant_check),
        ("uq_sl2_relations", uq_sl2_check),
        ("orthogonality", orthogonality_check),
        ("partition_t_invariance", partition_t_invariance),
        ("partition_s_invariance", partition_s_invariance),
    ]


def cmd_verify(cfg: RunConfig, inject_fault: bool = False) -> int:
    checks = []
    all_pass = True
    for name, fn in _verify_checks(cfg, inject_fault):
        t0 = time.perf_counter()
        out = fn()
        dt = time.perf_counter() - t0
        residual, tol = out[0], out[1]
        note = out[2] if len(out) > 2 else None
        ok = bool(residual <= tol)
        entry = {
            "name": name,
            "pass": ok,
            "residual": float(residual),
            "tolerance": float(tol),
            "wall_time": dt,
        }
        if note:
            entry["note"] = note
        checks.append(entry)
        all_pass = all_pass and ok
    emit_json({"checks": checks, "config": cfg.as_report(), "pass": all_pass})
    return 0 if all_pass else 1


# ----------------------------------------------------------------- main


def _add_common(parser, with_out=False):
    parser.add_argument("--M", type=int, default=3, dest="m")
    parser.add_argument("--N", type=int, default=2, dest="n")
    parser.add_argument("--tau", type=parse_complex, default=0.3 + 1.1j)
    parser.add_argument("--alpha1", type=float, default=0.0)
    parser.add_argument("--alpha2", type=float, default=0.0)
    parser.add_argument("--eps", type=float, default=1e-12)
    parser.add_argument("--grid", type=int, default=6)
    parser.add_argument("--quad", type=int, default=64)
    if with_out:
        parser.add_argument("--out", default=".")


def _config_from(args) -> RunConfig:
    return RunConfig(
        m=args.m,
        n=args.n,
        tau=args.tau,
        alpha1=args.alpha1,
        alpha2=args.alpha2,
        epsilon=args.eps,
        grid=args.grid,
        quad_nodes=args.quad,
        output_dir=getattr(args, "out", "."),
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nctorus",
        description="Magnetic Bloch states, quantum-torus matrices, and "
        "modular invariance checks at rational flux.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_theta = sub.add_parser("theta", help="evaluate one theta value with certificate")
    p_theta.add_argument("--level", type=int, required=True)
    p_theta.add_argument("--residue", type=int, default=0)
    p_theta.add_argument("--z", type=parse_complex, default=0j)
    p_theta.add_argument("--tau", type=parse_complex, required=True)
    p_theta.add_argument("--eps", type=float, default=1e-12)

    p_eta = sub.add_parser("eta", help="evaluate the eta function")
    p_eta.add_argument("--tau", type=parse_complex, required=True)
    p_eta.add_argument("--eps", type=float, default=1e-12)

    p_lll = sub.add_parser("lll", help="export ground-state grids and eigenphases")
    _add_common(p_lll, with_out=True)

    p_mat = sub.add_parser("matrices", help="dump clock/shift matrices and residuals")
    _add_common(p_mat)

    p_part = sub.add_parser("partition", help="state sum and invariance residuals")
    _add_common(p_part)

    p_sq = sub.add_parser("squeeze", help="squeeze parameters of tau")
    p_sq.add_argument("--tau", type=parse_complex, required=True)

    p_ver = sub.add_parser("verify", help="run the full verification battery")
    _add_common(p_ver)
    p_ver.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "theta":
            return cmd_theta(args)
        if args.command == "eta":
            return cmd_eta(args)
        if args.command == "squeeze":
            return cmd_squeeze(args)
        cfg = _config_from(args)
        if args.command == "lll":
            return cmd_lll(cfg)
        if args.command == "matrices":
            return cmd_matrices(cfg)
        if args.command == "partition":
            return cmd_partition(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, inject_fault=args.inject_fault)
        raise UsageError("unknown command %r" % args.command)
    except (UsageError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("I/O error: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
