#!/usr/bin/env -S python3 -u
"""
Command line for fuzzy-workbench.

    python main.py verify --space sphere --lambda-min 1 --lambda-max 4
    python main.py localization --space circle --format csv --out loc.csv
    python main.py resolution --space sphere --amplitudes omega.txt

Exit status: 0 when every check passes, 1 when one fails, 2 on a
configuration, input-file or write error. Reports go to stdout (or --out);
progress lines go to stderr.
"""

import argparse
import math
import sys
from typing import Dict, Iterator, Optional, Tuple

import numpy as np

from config import (
    AmplitudeFileError, ConfigError, KPolicy, RunConfig,
    SpaceKind, env_flag, env_int,
)
from fuzzy_circle import (
    build_circle, circle_a_mu_eigen, circle_dispersion, circle_lambda1_minimizer,
    circle_resolution_check, circle_scs_bound, circle_scs_omega, circle_su2_check,
    circle_ur_audit, circle_x1_analysis, a_mu_pairing_residual, a_mu_saturation,
    verify_circle_algebra,
)
from fuzzy_sphere import (
    ScsFamily, alpha1_monotone, build_sphere, projector_check, sphere_Bm_analysis,
    sphere_Bm_chain, sphere_chi_tilde, sphere_resolution_check, sphere_scs_bound,
    sphere_scs_family, sphere_so4_check, sphere_ur_audit, theorem2_audit,
    verify_sphere_algebra,
)
from numerics import StateVector, random_density_matrix, random_state
from report import (
    LocalizationReport, Report, ResolutionTable, SpectrumTable, UrAuditReport,
    VerifyReport, write_report,
)
from specfun import summation_suite

# Largest sphere cutoff the resolution command integrates (FUZZY_SPHERE_RESOLUTION_MAX)
SPHERE_RESOLUTION_MAX = env_int("FUZZY_SPHERE_RESOLUTION_MAX", 8, 1, 64)
# Eigen residual accepted for the non-Hermitian a_1^mu problem
A_MU_TOL = 1e-8

_DEBUG = env_flag("FUZZY_DEBUG_CLI")


def _info(msg: str) -> None:
    print(f"[fuzzy] {msg}", file=sys.stderr, flush=True)


def _dbg(msg: str) -> None:
    if _DEBUG:
        print(f"[fuzzy] {msg}", file=sys.stderr, flush=True)


# ---------------------------------------------------------------------------
# Amplitude files
# ---------------------------------------------------------------------------

def read_amplitudes(path: str, space: SpaceKind) -> Dict[Tuple[int, ...], complex]:
    """
    Parse an amplitude file: one `n re im` (circle) or `l m re im` (sphere)
    entry per line; blank lines and `#` comments are ignored.
    """
    want = 3 if space is SpaceKind.CIRCLE else 4
    out: Dict[Tuple[int, ...], complex] = {}
    try:
        with open(path, encoding="utf-8") as f:
            lines = f.readlines()
    except OSError as e:
        raise AmplitudeFileError(path, 0, f"cannot read: {e.strerror}") from e

    for no, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != want:
            raise AmplitudeFileError(path, no, f"expected {want} fields, got {len(parts)}")
        try:
            key = tuple(int(p) for p in parts[:want - 2])
            re, im = float(parts[-2]), float(parts[-1])
        except ValueError as e:
            raise AmplitudeFileError(path, no, str(e)) from e
        if not (math.isfinite(re) and math.isfinite(im)):
            raise AmplitudeFileError(path, no, "amplitude is not finite")
        if space is SpaceKind.SPHERE and (key[0] < 0 or abs(key[1]) > key[0]):
            raise AmplitudeFileError(path, no, f"no basis vector l={key[0]} m={key[1]}")
        if key in out:
            raise AmplitudeFileError(path, no, f"duplicate entry {key}")
        out[key] = complex(re, im)

    if not out:
        raise AmplitudeFileError(path, len(lines), "no amplitudes")
    if all(v == 0 for v in out.values()):
        raise AmplitudeFileError(path, len(lines), "all amplitudes are zero")
    return out


def _fits(entries: Dict[Tuple[int, ...], complex], lam: int) -> bool:
    return all(abs(key[0]) <= lam for key in entries)


def _user_state(entries: Dict[Tuple[int, ...], complex], space) -> StateVector:
    amp = np.zeros(space.dim, dtype=complex)
    for key, v in entries.items():
        i = key[0] + space.lam if len(key) == 1 else space.index(*key)
        amp[i] = v
    return StateVector.normalized(amp, space.basis)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def _spaces(cfg: RunConfig) -> Iterator:
    build = build_circle if cfg.space is SpaceKind.CIRCLE else build_sphere
    for lam in cfg.lambdas():
        _dbg(f"building {cfg.space.value} lambda={lam}")
        yield build(lam, cfg.k_policy, cfg.k_value)


def _verify_row(rep: Report, space, suite: str, relation: str, residual: float, tol: float) -> None:
    ok = residual <= tol
    rep.add_row(lam=space.lam, k=space.k, suite=suite, relation=relation, residual=residual, tol=tol, ok=ok)
    rep.check(f"{suite}.{relation}", space.lam, residual, tol, ok)


def cmd_verify(cfg: RunConfig) -> Report:
    rep = VerifyReport("verify", cfg)
    tol = cfg.tol
    for space in _spaces(cfg):
        if cfg.space is SpaceKind.CIRCLE:
            suite = verify_circle_algebra(space, tol)
            for name, r in suite.residuals.items():
                _verify_row(rep, space, "circle_algebra", name, r, tol)
            _verify_row(rep, space, "su2_dressing", "max_deviation", circle_su2_check(space), tol)
        else:
            suite = verify_sphere_algebra(space, tol)
            for name, r in suite.residuals.items():
                _verify_row(rep, space, "sphere_algebra", name, r, tol)
            so4 = sphere_so4_check(space)
            scale = max(1.0, so4.expected_casimir)
            _verify_row(rep, space, "so4", "bracket", so4.bracket_residual, tol)
            _verify_row(rep, space, "so4", "casimir_spread", so4.casimir_spread, tol * scale)
            _verify_row(rep, space, "so4", "casimir_value",
                        abs(so4.casimir_pairs - so4.expected_casimir), tol * scale)
            _verify_row(rep, space, "so4", "pseudo_casimir", so4.pseudo_casimir, tol * scale)
            worst = max(projector_check(space, h) for h in range(-space.lam, space.lam + 1))
            _verify_row(rep, space, "projector", "all_h", worst, tol)
        _info(f"verify {cfg.space.value} lambda={space.lam} k={space.k:g}")

    identities = summation_suite(max(2, cfg.lambda_max))
    for name, r in identities.items():
        ok = r <= tol
        rep.add_row(suite="identities", relation=name, residual=r, tol=tol, ok=ok)
        rep.check(f"identities.{name}", None, r, tol, ok)
    return rep


def cmd_localization(cfg: RunConfig) -> Report:
    rep = LocalizationReport("localization", cfg)
    for space in _spaces(cfg):
        lam = space.lam
        if cfg.space is SpaceKind.SPHERE:
            _, omega = sphere_scs_family(space, ScsFamily.OMEGA_LL)
            _, phi = sphere_scs_family(space, ScsFamily.PHI_L0)
            _, chi, cmp = sphere_chi_tilde(space)
            omega_bound = sphere_scs_bound(lam, ScsFamily.OMEGA_LL)
            phi_bound = sphere_scs_bound(lam, ScsFamily.PHI_L0)
            rep.add_row(
                lam=lam, k=space.k, madore_min=cmp.madore,
                phi_scs_disp=phi.disp_x2, chi_tilde_disp=chi.disp_x2, omega_scs_disp=omega.disp_x2,
                phi_scs_bound=phi_bound, omega_scs_bound=omega_bound,
                chi_intermediate_bound=cmp.intermediate_bound, chi_pi_bound=cmp.pi_bound,
                coarse_bound=cmp.coarse_bound, phi_below_madore=phi.disp_x2 < cmp.madore,
                chi_below_intermediate=cmp.below_intermediate, chi_below_madore=cmp.below_madore,
                chi_below_pi_bound=cmp.below_pi_bound if lam >= 3 else None,
            )
            rep.check("omega_scs_disp", lam, omega.disp_x2, omega_bound, omega.disp_x2 < omega_bound)
            rep.check("phi_scs_disp", lam, phi.disp_x2, phi_bound, phi.disp_x2 < phi_bound)
            rep.check("chi_tilde_intermediate", lam, chi.disp_x2, cmp.intermediate_bound,
                      cmp.below_intermediate)
            rep.check("chi_tilde_madore", lam, chi.disp_x2, cmp.madore, cmp.below_madore)
            if lam >= 3:
                rep.check("chi_tilde_pi", lam, chi.disp_x2, cmp.pi_bound, cmp.below_pi_bound)
                rep.check("chi_tilde_coarse", lam, chi.disp_x2, cmp.coarse_bound,
                          chi.disp_x2 < cmp.coarse_bound)
        else:
            scs = circle_dispersion(space, circle_scs_omega(space)).disp_x2
            bound = circle_scs_bound(lam)
            x1 = circle_x1_analysis(space)
            lam1 = circle_lambda1_minimizer()[1] if lam == 1 else None
            rep.add_row(
                lam=lam, k=space.k, scs_disp=scs, scs_bound=bound,
                toeplitz_disp=x1.toeplitz_disp, toeplitz_bound=x1.toeplitz_bound,
                toeplitz_below_bound=x1.toeplitz_below_bound, lambda1_min=lam1,
            )
            rep.check("scs_disp", lam, scs, bound, scs < bound)
            rep.check("toeplitz_disp", lam, x1.toeplitz_disp, x1.toeplitz_bound, x1.toeplitz_below_bound)
            if lam1 is not None:
                rep.check("lambda1_minimum", lam, lam1, 7.0 / 32.0, abs(lam1 - 7.0 / 32.0) <= cfg.tol)
        _info(f"localization {cfg.space.value} lambda={lam}")
    return rep


def _resolution_row(rep: Report, space, family: str, res, tol: float, aliasing: bool = False) -> None:
    rep.add_row(
        lam=space.lam, k=space.k, family=family, nodes="x".join(str(n) for n in res.nodes),
        residual=res.residual, measured_constant=res.measured_constant,
        expected_constant=res.expected_constant, norm_condition=res.norm_condition,
        under_resolved=res.under_resolved, profile=res.profile,
    )
    if not res.norm_condition:
        _info(f"{family} lambda={space.lam}: norm condition fails, profile "
              + " ".join(f"{p:.6g}" for p in res.profile))
    if aliasing:
        rep.check(f"{family}.flagged", space.lam, res.residual, tol, res.under_resolved)
        return
    constant_ok = abs(res.measured_constant - res.expected_constant) <= tol * max(1.0, res.expected_constant)
    rep.check(f"{family}.constant", space.lam, res.measured_constant, res.expected_constant, constant_ok)
    # the resolution holds exactly when the norm condition does
    rep.check(f"{family}.residual", space.lam, res.residual, tol, (res.residual <= tol) == res.norm_condition)


def cmd_resolution(cfg: RunConfig) -> Report:
    rep = ResolutionTable("resolution", cfg)
    tol = cfg.tol
    entries = read_amplitudes(cfg.amplitudes_path, cfg.space) if cfg.amplitudes_path else None

    for space in _spaces(cfg):
        lam = space.lam
        if cfg.space is SpaceKind.CIRCLE:
            _resolution_row(rep, space, "omega", circle_resolution_check(space, nodes=cfg.nodes_phi), tol)
            if entries is not None:
                if _fits(entries, lam):
                    user = _user_state(entries, space)
                    _resolution_row(rep, space, "user",
                                    circle_resolution_check(space, nodes=cfg.nodes_phi, omega=user), tol)
                else:
                    _info(f"amplitude file does not fit lambda={lam}; skipped")
            _resolution_row(rep, space, "omega_aliased", circle_resolution_check(space, nodes=2 * lam), tol,
                            aliasing=True)
        else:
            if lam > SPHERE_RESOLUTION_MAX:
                _info(f"sphere resolution is capped at lambda={SPHERE_RESOLUTION_MAX}; lambda={lam} skipped")
                continue
            nodes = dict(nodes_phi=cfg.nodes_phi, nodes_theta=cfg.nodes_theta, nodes_psi=cfg.nodes_psi)
            _resolution_row(rep, space, "omega_ll", sphere_resolution_check(space, **nodes), tol)
            _resolution_row(rep, space, "phi_l0_coset",
                            sphere_resolution_check(space, nodes_phi=cfg.nodes_phi,
                                                    nodes_theta=cfg.nodes_theta, coset=True), tol)
            if entries is not None:
                if _fits(entries, lam):
                    user = _user_state(entries, space)
                    _resolution_row(rep, space, "user", sphere_resolution_check(space, user, **nodes), tol)
                else:
                    _info(f"amplitude file does not fit lambda={lam}; skipped")
            _resolution_row(rep, space, "omega_ll_aliased",
                            sphere_resolution_check(space, nodes_phi=2 * lam, nodes_theta=lam + 1,
                                                    nodes_psi=2 * lam), tol, aliasing=True)
        _info(f"resolution {cfg.space.value} lambda={lam}")
    return rep


def cmd_spectrum(cfg: RunConfig) -> Report:
    rep = SpectrumTable("spectrum", cfg)
    tol = cfg.tol
    for space in _spaces(cfg):
        lam, k = space.lam, space.k
        if cfg.space is SpaceKind.CIRCLE:
            x1 = circle_x1_analysis(space)
            flags = x1.spectrum.property_flags
            rep.add_row(lam=lam, k=k, kind="x1", top=x1.spectrum.top, residual=x1.spectrum.residual,
                        symmetric=flags["symmetric_spectrum"], simple=flags["simple"],
                        interlaces_previous=flags["interlaces_previous"], extra=x1.toeplitz_spectrum_gap)
            rep.check("x1.symmetric", lam, None, None, flags["symmetric_spectrum"])
            rep.check("x1.simple", lam, None, None, flags["simple"])
            if flags["interlaces_previous"] is not None:
                rep.check("x1.interlaces_previous", lam, None, None, flags["interlaces_previous"])

            pairs = circle_a_mu_eigen(space, cfg.mu)
            for p in pairs:
                sat = a_mu_saturation(space, p)
                rep.add_row(lam=lam, k=k, kind="a_mu", z_re=p.z.real, z_im=p.z.imag,
                            residual=p.residual, extra=sat)
                rep.check("a_mu.residual", lam, p.residual, A_MU_TOL, p.residual <= A_MU_TOL)
                rep.check("a_mu.saturation", lam, sat, A_MU_TOL, abs(sat) <= A_MU_TOL)
            pairing = a_mu_pairing_residual(space, cfg.mu, pairs)
            rep.check("a_mu.pairing", lam, pairing, A_MU_TOL, pairing <= A_MU_TOL)
        else:
            for m in range(lam + 1):
                bm = sphere_Bm_analysis(space, m)
                flags = bm.property_flags
                rep.add_row(lam=lam, k=k, kind="bm", m=m, top=bm.top, residual=bm.residual,
                            symmetric=flags["symmetric_spectrum"], simple=flags["simple"])
                rep.check(f"bm{m}.symmetric", lam, None, None, flags["symmetric_spectrum"])
                rep.check(f"bm{m}.simple", lam, None, None, flags["simple"])
            chain = sphere_Bm_chain(space)
            rep.add_row(lam=lam, k=k, kind="chain", top=chain.alphas[0], extra=chain.max_gap)
            rep.check("chain.decreasing", lam, None, None, chain.decreasing)
            rep.check("chain.above_cos", lam, chain.alphas[0], math.cos(math.pi / (lam + 2)), chain.above_cos)
            rep.check("chain.density", lam, chain.max_gap, chain.gap_bound, chain.max_gap <= chain.gap_bound)
            rep.check("chain.a_above_half", lam, chain.min_a, 0.5, chain.min_a > 0.5)
        _info(f"spectrum {cfg.space.value} lambda={lam}")

    if cfg.space is SpaceKind.SPHERE and cfg.lambda_max >= 2:
        vals, increasing = alpha1_monotone(cfg.lambda_max, KPolicy.LAMBDA6)
        rep.check("alpha1_monotone_lambda6", cfg.lambda_max, vals[-1], None, increasing)
    _dbg(f"spectrum done, tol={tol}")
    return rep


def cmd_ur_audit(cfg: RunConfig) -> Report:
    rep = UrAuditReport("ur-audit", cfg)
    tol = cfg.tol
    for space in _spaces(cfg):
        lam = space.lam
        rng = np.random.default_rng([cfg.seed, lam])
        pure = [random_state(space.dim, rng, space.basis) for _ in range(cfg.samples)]
        mixed = [random_density_matrix(space.dim, rng, 1 + i % 4) for i in range(max(1, cfg.samples // 10))]

        worst: Dict[str, float] = {}
        for st in pure + mixed:
            if cfg.space is SpaceKind.CIRCLE:
                slacks = dict(circle_ur_audit(space, st).slacks)
            else:
                slacks = dict(sphere_ur_audit(space, st).slacks)
                slacks["angular"] = theorem2_audit(space, st)
            for name, v in slacks.items():
                worst[name] = min(worst.get(name, math.inf), v)

        n = len(pure) + len(mixed)
        for name, v in worst.items():
            ok = v >= -tol
            rep.add_row(lam=lam, k=space.k, inequality=name, min_slack=v, samples=n, ok=ok)
            rep.check(name, lam, v, -tol, ok)
        _info(f"ur-audit {cfg.space.value} lambda={lam} samples={n}")
    return rep


COMMANDS = {
    "verify": cmd_verify,
    "localization": cmd_localization,
    "resolution": cmd_resolution,
    "spectrum": cmd_spectrum,
    "ur-audit": cmd_ur_audit,
}


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def get_parser():
    ap = argparse.ArgumentParser(description="fuzzy circle / fuzzy sphere numerical workbench")
    ap.add_argument("command", choices=tuple(COMMANDS), help="What to compute.")
    ap.add_argument("--space", choices=("circle", "sphere"), default="circle", help="Which fuzzy space.")
    ap.add_argument("--lambda-min", type=int, default=1, help="Smallest cutoff (default 1).")
    ap.add_argument("--lambda-max", type=int, default=4, help="Largest cutoff (default 4).")
    ap.add_argument("--k-policy", choices=tuple(p.value for p in KPolicy), default="min_kineq",
                    help="How k follows the cutoff (default min_kineq).")
    ap.add_argument("--k", type=float, default=None, help="k for the 'explicit' policy.")
    ap.add_argument("--tol", type=float, default=1e-10, help="Pass/fail tolerance (default 1e-10).")
    ap.add_argument("--seed", type=int, default=0, help="Seed for random states (default 0).")
    ap.add_argument("--format", choices=("json", "csv"), default="json", help="Report format.")
    ap.add_argument("--out", default=None, help="Report file (default: stdout).")
    ap.add_argument("--nodes-phi", type=int, default=None, help="Periodic nodes in phi (default 2L+2).")
    ap.add_argument("--nodes-theta", type=int, default=None, help="Gauss-Legendre nodes in cos(theta).")
    ap.add_argument("--nodes-psi", type=int, default=None, help="Periodic nodes in psi (default 2L+2).")
    ap.add_argument("--samples", type=int, default=1000, help="Random states per cutoff for ur-audit.")
    ap.add_argument("--amplitudes", default=None, help="Fiducial state file for resolution.")
    ap.add_argument("--mu", type=float, default=1.0, help="mu of a_1^mu = L - i mu x1 (default 1).")
    return ap


def config_from_args(args) -> RunConfig:
    return RunConfig(
        space=args.space, lambda_min=args.lambda_min, lambda_max=args.lambda_max,
        k_policy=args.k_policy, k_value=args.k, tol=args.tol, seed=args.seed,
        output_format=args.format, output_path=args.out, nodes_phi=args.nodes_phi,
        nodes_theta=args.nodes_theta, nodes_psi=args.nodes_psi, samples=args.samples,
        amplitudes_path=args.amplitudes, mu=args.mu,
    )


def _worst(rep: Report):
    """The failed check with the largest magnitude, else the first failure."""
    numeric = [c for c in rep.failures if isinstance(c.value, (int, float)) and not isinstance(c.value, bool)]
    return max(numeric, key=lambda c: abs(c.value)) if numeric else rep.failures[0]


def run(args) -> int:
    try:
        cfg = config_from_args(args)
        rep = COMMANDS[args.command](cfg)
        text = write_report(rep, cfg.output_path, cfg.output_format)
    except ConfigError as e:
        _info(f"error: {e}")
        return 2
    except OSError as e:
        _info(f"error: cannot write report: {e}")
        return 2

    if text is not None:
        sys.stdout.write(text)
    else:
        _info(f"wrote {cfg.output_path}")
    code = rep.exit_code()
    if code:
        worst = _worst(rep)
        _info(f"{len(rep.failures)} check(s) failed; worst: {worst.name} lambda={worst.lam} "
              f"value={worst.value!r} bound={worst.bound!r}")
    else:
        _info(f"all {len(rep.results)} checks passed")
    return code


def main(argv: Optional[list] = None) -> None:
    args = get_parser().parse_args(argv)
    sys.exit(run(args))


if __name__ == "__main__":
    main()
