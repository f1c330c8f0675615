"""Command-line interface: ``hulthen-pdm {spectrum,wavefunction,verify,nu-demo}``.

Settings are resolved in three layers: built-in defaults, then a flat
``key = value`` config file (``--config``), then explicit flags.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, fields

from . import nu_engine as nu
from . import report
from .errors import (
    ComplexParameterError,
    NoRealBranchError,
    OracleNonConvergence,
    PDMError,
    QuantumNumberError,
    UnsupportedSigmaError,
)
from .model import REFERENCE, ModelParams, _s_pair
from .oracle import GridSpec
from .spectrum import (
    assemble_ode,
    bound_state,
    bound_states,
    energy_level,
    energy_level_as_printed,
    wavefunction,
)
from .verification import DEFAULT_MAX_GROW, DEFAULT_TOL, verify

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_COMPLEX = 3
EXIT_QUANTUM_NUMBER = 4
EXIT_VERIFY_FAILED = 5
EXIT_NONCONVERGENCE = 6

MODELS = ("harmonic-oscillator", "hulthen-pdm")
FORMATS = ("json", "csv")


class ConfigError(PDMError):
    """Unreadable config file or invalid setting."""


@dataclass
class RunConfig:
    v0: float = REFERENCE.V0
    lam: float = REFERENCE.lam
    q: float = REFERENCE.q
    alpha: float = REFERENCE.alpha
    beta: float = REFERENCE.beta
    eta: float = REFERENCE.eta
    case: int = 1
    grid_min: float = -30.0
    grid_max: float = 30.0
    grid_n: int = 4000
    format: str = "json"
    out: str | None = None
    tol: float = DEFAULT_TOL
    max_grow: int = DEFAULT_MAX_GROW
    no_richardson: bool = False
    n: int | None = None
    model: str = "hulthen-pdm"
    epsilon: float = 5.0
    energy: float | None = None

    def params(self) -> ModelParams:
        return ModelParams(V0=self.v0, lam=self.lam, q=self.q, alpha=self.alpha, beta=self.beta, eta=self.eta)

    def grid(self) -> GridSpec:
        return GridSpec(self.grid_min, self.grid_max, self.grid_n)


# config-file key -> RunConfig attribute
_ALIASES = {"lambda": "lam", "V0": "v0"}
_FIELDS = {f.name: f for f in fields(RunConfig)}


def _coerce(name: str, raw: str):
    kind = _FIELDS[name].type
    text = raw.strip()
    try:
        if "bool" in kind:
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if "int" in kind:
            return int(text)
        if "float" in kind:
            value = float(text)
            if not math.isfinite(value):
                raise ValueError(text)
            return value
    except ValueError:
        raise ConfigError(f"invalid value for {name!r}: {raw!r}") from None
    return text


def read_config(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc.strerror}") from None
    out = {}
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        name = _ALIASES.get(key, key.replace("-", "_"))
        if name not in _FIELDS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[name] = _coerce(name, value)
    return out


def _add_shared(sp: argparse.ArgumentParser) -> None:
    g = sp.add_argument_group("model")
    g.add_argument("--v0", type=float, help="potential depth V0 (default 10)")
    g.add_argument("--lambda", dest="lam", type=float, help="screening parameter lambda (default 1)")
    g.add_argument("--q", type=float, help="deformation q (default -1)")
    g.add_argument("--alpha", type=float, help="ordering parameter alpha (default -0.5)")
    g.add_argument("--beta", type=float, help="ordering parameter beta (default 0)")
    g.add_argument("--eta", type=float, help="transform exponent eta (default 0.5)")
    g.add_argument("--case", type=int, choices=(1, 2), help="sign branch of Lambda_n (default 1)")
    g = sp.add_argument_group("grid and output")
    g.add_argument("--grid-min", type=float, help="left end of the x grid (default -30)")
    g.add_argument("--grid-max", type=float, help="right end of the x grid (default 30)")
    g.add_argument("--grid-n", type=int, help="number of grid points (default 4000)")
    g.add_argument("--format", choices=FORMATS, help="output format (default json)")
    g.add_argument("--out", help="write to this path (atomically) instead of stdout")
    g.add_argument("--config", help="flat key = value settings file; flags override it")
    g.add_argument("--tol", type=float, help="relative tolerance for verify (default 1e-3)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hulthen-pdm",
        description="Bound states of the Hulthen potential with position-dependent mass.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="closed-form bound-state energies")
    _add_shared(sp)

    sp = sub.add_parser("wavefunction", help="sampled, normalized wavefunction of level n")
    _add_shared(sp)
    sp.add_argument("--n", type=int, help="quantum number")

    sp = sub.add_parser("verify", help="check the closed form against the finite-difference oracle")
    _add_shared(sp)
    sp.add_argument("--max-grow", type=int, help="maximum number of x1.5 domain growth steps (default 4)")
    sp.add_argument("--no-richardson", action="store_true", default=None,
                    help="compare against the single-grid eigenvalues")

    sp = sub.add_parser("nu-demo", help="candidate (k, pi) branches of the NU method")
    _add_shared(sp)
    sp.add_argument("--model", choices=MODELS, help="built-in equation (default hulthen-pdm)")
    sp.add_argument("--epsilon", type=float, help="oscillator energy parameter (default 5)")
    sp.add_argument("--energy", type=float, help="trial energy for hulthen-pdm (default: ground state)")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(read_config(args.config))
    for name in _FIELDS:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    cfg = RunConfig(**values)
    if cfg.format not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}, got {cfg.format!r}")
    if cfg.model not in MODELS:
        raise ConfigError(f"unknown model {cfg.model!r}; choose from {', '.join(MODELS)}")
    if cfg.case not in (1, 2):
        raise ConfigError(f"case must be 1 or 2, got {cfg.case}")
    if not cfg.tol > 0:
        raise ConfigError(f"tolerance must be positive, got {cfg.tol}")
    return cfg


# ---------------------------------------------------------------- subcommands

SPECTRUM_HEADER = ["n", "E_closed", "E_printed_case1", "E_printed_case2", "physical",
                   "exponent_left", "exponent_right", "jacobi_a", "jacobi_b", "norm_constant"]

VERIFY_HEADER = ["n", "E_closed", "E_printed_case1", "E_printed_case2", "E_oracle_single",
                 "E_oracle_extrapolated", "rel_diff_closed_vs_oracle", "residual_ode", "physical"]


def cmd_spectrum(cfg: RunConfig) -> tuple[int, str]:
    p = cfg.params()
    rows = []
    for st in bound_states(p, cfg.case):
        rows.append({
            "n": st.n,
            "E_closed": st.energy,
            "E_printed_case1": energy_level_as_printed(p, st.n, 1),
            "E_printed_case2": energy_level_as_printed(p, st.n, 2),
            "physical": st.physical,
            "exponent_left": st.exponent_left,
            "exponent_right": st.exponent_right,
            "jacobi_a": st.jacobi_a,
            "jacobi_b": st.jacobi_b,
            "norm_constant": st.norm_constant,
        })
    if cfg.format == "csv":
        return EXIT_OK, report.to_csv(rows, SPECTRUM_HEADER)
    verdict = {"status": "ok", "case": cfg.case, "bound_state_count": len(rows), "regime": p.regime}
    return EXIT_OK, report.to_json(report.envelope(p, None, rows, verdict))


def cmd_wavefunction(cfg: RunConfig) -> tuple[int, str]:
    p = cfg.params()
    if cfg.n is None:
        raise ConfigError("wavefunction needs --n")
    if cfg.n < 0:
        raise QuantumNumberError(f"quantum number must be >= 0, got {cfg.n}")
    st = bound_state(p, cfg.n, cfg.case)
    wf = wavefunction(p, st)
    g = cfg.grid()
    x = g.nodes()
    s, oms = _s_pair(p, x)
    phi = wf.phi_x(x)
    psi = wf.sign * wf.norm * wf.psi(s, oms)
    info = {
        "n": st.n, "energy": st.energy, "exponent_left": st.exponent_left,
        "exponent_right": st.exponent_right, "jacobi_a": st.jacobi_a, "jacobi_b": st.jacobi_b,
        "norm_constant": st.norm_constant, "eta": st.eta,
    }
    if cfg.format == "csv":
        comment = " ".join(f"{k}={report.fmt(v) if isinstance(v, float) else v}" for k, v in info.items())
        rows = [{"x": a, "s": b, "psi": c, "Phi": d} for a, b, c, d in zip(x, s, psi, phi)]
        return EXIT_OK, report.to_csv(rows, ["x", "s", "psi", "Phi"], comment=comment)
    level = dict(info, samples={"x": x.tolist(), "s": s.tolist(), "psi": psi.tolist(), "Phi": phi.tolist()})
    grid = {"x_min": g.x_min, "x_max": g.x_max, "n_points": g.n_points}
    return EXIT_OK, report.to_json(report.envelope(p, grid, [level], {"status": "ok"}))


def _grid_block(rep) -> dict:
    g, req = rep.grid, rep.requested_grid
    block = {
        "x_min": g.x_min, "x_max": g.x_max, "n_points": g.n_points, "h": g.h,
        "scheme": "plain" if rep.params.q > 0 else "gauged",
        "requested": {"x_min": req.x_min, "x_max": req.x_max, "n_points": req.n_points},
        "richardson": rep.richardson,
        "convergence": None,
    }
    if rep.study is not None:
        block["convergence"] = {
            "rows": rep.study.as_table(),
            "extrapolated": rep.study.extrapolated,
            "error_estimate": rep.study.error_estimate,
            "observed_order": rep.study.observed_order,
        }
    return block


def cmd_verify(cfg: RunConfig) -> tuple[int, str]:
    p = cfg.params()
    try:
        rep = verify(p, cfg.grid(), case=cfg.case, tol=cfg.tol, richardson=not cfg.no_richardson,
                     max_grow=cfg.max_grow)
    except OracleNonConvergence as exc:
        g = cfg.grid()
        grid = {"x_min": g.x_min, "x_max": g.x_max, "n_points": g.n_points, "convergence": exc.table}
        verdict = {"status": "oracle-non-convergence", "passed": False, "message": str(exc)}
        return EXIT_NONCONVERGENCE, report.to_json(report.envelope(p, grid, [], verdict))
    _NOTES.extend(rep.warnings)
    levels = [report.clean(r) for r in rep.levels]
    code = EXIT_OK if rep.passed else EXIT_VERIFY_FAILED
    if cfg.format == "csv":
        return code, report.to_csv(levels, VERIFY_HEADER)
    verdict = {
        "status": rep.status,
        "passed": rep.passed,
        "warning": bool(rep.warnings),
        "warnings": rep.warnings,
        "tolerance": rep.tolerance,
        "residual_tolerance": rep.residual_tolerance,
        "closed_form_levels": sum(1 for r in rep.levels if r.E_closed is not None),
        "oracle_levels": rep.oracle_count,
    }
    return code, report.to_json(report.envelope(p, _grid_block(rep), levels, verdict))


BRANCH_HEADER = ["k", "pi_0", "pi_1", "tau_0", "tau_1", "tau_prime", "lambda_k", "admissible", "selected", "note"]


def cmd_nu_demo(cfg: RunConfig) -> tuple[int, str]:
    if cfg.model == "harmonic-oscillator":
        form = nu.harmonic_oscillator_form(cfg.epsilon)
        params = {"epsilon": cfg.epsilon}
    else:
        p = cfg.params()
        energy = cfg.energy if cfg.energy is not None else energy_level(p, 0, cfg.case)
        if energy is None:
            raise ConfigError("no bound ground state for these parameters; pass --energy")
        form = assemble_ode(p, energy)
        params = dict(report.params_block(p), energy=energy)
    branches = nu.candidate_branches(form)
    rows = [{
        "k": b.k, "pi_0": b.pi[0], "pi_1": b.pi[1], "tau_0": b.tau[0], "tau_1": b.tau[1],
        "tau_prime": b.tau_prime, "lambda_k": b.lambda_of_k, "admissible": b.admissible,
        "selected": b.selected, "note": b.note,
    } for b in branches]
    if cfg.format == "csv":
        return EXIT_OK, report.to_csv(rows, BRANCH_HEADER)
    chosen = next((b for b in branches if b.selected), None)
    verdict = {"model": cfg.model, "selected_k": None, "n_real": None, "n_nearest": None,
               "mismatch": None, "quantized": False}
    if chosen is not None:
        n_real, n_near, mismatch = nu.matching_level(chosen, form)
        tol = 1e-9 * max(1.0, abs(chosen.lambda_of_k))
        verdict.update(selected_k=chosen.k, n_real=n_real, n_nearest=n_near, mismatch=mismatch,
                       quantized=bool(abs(mismatch) <= tol and abs(n_real - n_near) <= 1e-6))
    doc = report.clean({"params": params, "grid": None, "levels": rows, "verdict": verdict,
                        "version": report.__version__})
    return EXIT_OK, report.to_json(doc)


# warnings collected by a command for stderr
_NOTES: list[str] = []

COMMANDS = {"spectrum": cmd_spectrum, "wavefunction": cmd_wavefunction,
            "verify": cmd_verify, "nu-demo": cmd_nu_demo}


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        report.write_atomic(cfg.out, text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _NOTES.clear()
    try:
        cfg = resolve_config(args)
        code, text = COMMANDS[args.command](cfg)
    except ComplexParameterError as exc:
        print(f"error: complex parameter: {exc}", file=sys.stderr)
        return EXIT_COMPLEX
    except QuantumNumberError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_QUANTUM_NUMBER
    except (NoRealBranchError, UnsupportedSigmaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PDMError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        _emit(cfg, text)
    except OSError as exc:
        print(f"error: cannot write {cfg.out!r}: {exc.strerror}", file=sys.stderr)
        return EXIT_CONFIG
    if code == EXIT_VERIFY_FAILED:
        print("verification failed: see report", file=sys.stderr)
    elif code == EXIT_NONCONVERGENCE:
        print("error: oracle did not converge: see report", file=sys.stderr)
    for line in _NOTES:
        print(f"warning: {line}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
