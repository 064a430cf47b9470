"""Command-line front end.

Every subcommand reads a plain ``key = value`` config (``--config``);
the numeric flags override the config.  Tables go out as CSV with
``#`` header lines, expansion coefficients as JSON.

Exit codes: 0 success, 2 config error, 3 numerical failure,
4 domain violation under ``--strict-domain``.
"""
import argparse
from dataclasses import dataclass, field
import math
import sys
import warnings

import numpy as np

from .contour import Contour
from .errors import (ConfigError, ContourInadequateError, DomainError, IllConditionedFitError,
                     InvalidRotationError, JostError, NonConvergenceError, ZeroDenominatorError,
                     ZeroEnergyPoleError)
from .expansion import (ExpansionSet, approx_jost_many, effective_range_params,
                        fit_coefficients, integrate_expansion)
from .jost import RiemannPoint, in_domain_D, jost_factorized, s_matrix
from .potential import ZeroPotential, potential_from_config, read_keyvalue
from .riccati import PHYSICAL, RESONANT, LogBranch, _bessel_tilde, _sc_series
from .spectrum import (find_spectral_points, jost_many, levinson_check, partial_cross_section,
                       phase_shift_curve)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_DOMAIN = 0, 2, 3, 4
FMT = "%.10g"


# -- config ----------------------------------------------------------------------

@dataclass
class RunConfig:
    """Parsed key/value config; ``to_text`` writes it back unchanged in content."""
    entries: dict = field(default_factory=dict)

    @classmethod
    def from_lines(cls, lines):
        return cls(read_keyvalue(lines))

    @classmethod
    def from_file(cls, path):
        try:
            return cls(read_keyvalue(path))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None

    def to_text(self):
        return "".join(f"{k} = {v}\n" for k, (v, _) in self.entries.items())

    def __contains__(self, key):
        return key in self.entries

    def set(self, key, value):
        self.entries[key] = (str(value), None)

    def raw(self, key, default=None):
        return self.entries[key][0] if key in self.entries else default

    def _convert(self, key, default, conv, what):
        if key not in self.entries:
            return default
        val, no = self.entries[key]
        try:
            return conv(val)
        except ValueError:
            raise ConfigError(f"key {key!r}: expected {what}, got {val!r}", key=key,
                              line=no) from None

    def number(self, key, default=None):
        return self._convert(key, default, float, "a number")

    def integer(self, key, default=None):
        return self._convert(key, default, int, "an integer")

    def complex(self, key, default=None):
        return self._convert(key, default, lambda s: complex(s.replace(" ", "")),
                             "a complex number")

    def numbers(self, key, default=None, count=None):
        def conv(s):
            out = [float(x) for x in s.split(",")]
            if count is not None and len(out) != count:
                raise ValueError
            return out
        return self._convert(key, default, conv,
                             f"{count} comma-separated numbers" if count else "numbers")

    def sheet(self, key, default):
        return self._convert(key, default, LogBranch.parse, "a sheet name")


def _contour(cfg):
    """Base contour from config keys rmax, rtol, atol, r_start, theta."""
    theta = cfg.raw("theta", "zero-im-kr")
    policy = theta if theta in ("zero-im-kr", "real-axis") else None
    th = 0.0 if policy else cfg.number("theta")
    rtol = cfg.number("rtol", 1e-12)
    try:
        c = Contour(theta=th, r_start=cfg.number("r_start", 1e-6), r_max=cfg.number("rmax", 70.0),
                    rtol=rtol, atol=cfg.number("atol", min(1e-14, rtol * 1e-2)))
    except (ValueError, InvalidRotationError) as exc:
        raise ConfigError(f"contour: {exc}") from None
    return c, policy or "explicit"


def _write(out, text):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _csv(header, rows, comments=()):
    lines = [f"# {c}\n" for c in comments]
    lines.append("# " + ",".join(header) + "\n")
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else FMT % v for v in row) + "\n")
    return "".join(lines)


def _cz(z):
    z = complex(z)
    return f"{FMT % z.real}{'+' if z.imag >= 0 or math.isnan(z.imag) else '-'}{FMT % abs(z.imag)}j"


# -- subcommands -------------------------------------------------------------------

def cmd_spectrum(cfg, pot, units, contour, args):
    ell = cfg.integer("ell", 0)
    rows = []
    unresolved = []
    if not isinstance(pot, ZeroPotential):
        bound = cfg.numbers("bound_region", [-50.0, -0.05], count=2)
        nb = cfg.integer("bound_grid", 200)
        res = cfg.numbers("resonance_region", [0.1, 10.0, -22.0, 0.0], count=4)
        ng = [int(v) for v in cfg.numbers("resonance_grid", [34, 30], count=2)]
        tol = args.tol or cfg.number("root_tol", 1e-8)
        scans = [find_spectral_points(pot, ell, (bound[0], bound[1], 0.0, 0.0), PHYSICAL, (nb, 1),
                                      contour, units, tol=tol),
                 find_spectral_points(pot, ell, tuple(res), RESONANT, tuple(ng), contour, units,
                                      tol=tol)]
        for sc in scans:
            for p in sc:
                rows.append((p.Er, p.Gamma, p.kind, p.sheet.name, p.rel_residual, p.quality))
            unresolved += sc.unresolved
    notes = [f"spectral points E = Er - i Gamma/2, ell = {ell}, c2mu = {units.c2mu:.16g}",
             f"r_max = {contour.r_max:g}, rtol = {contour.rtol:g}"]
    notes += [f"unresolved seed {_cz(s)}" for s in unresolved]
    _write(args.out, _csv(["Er", "Gamma", "kind", "sheet", "rel_residual", "quality"], rows, notes))
    return EXIT_OK


def _expansion_contour(cfg, E0, units, contour, policy):
    if policy == "explicit":
        return contour
    if policy == "real-axis" or complex(E0).imag == 0:
        return contour.with_(theta=0.0)
    th = float(np.angle(np.sqrt(units.c2mu * complex(E0))))
    return contour.with_(theta=th)


def cmd_expand(cfg, pot, units, contour, args, policy="zero-im-kr"):
    E0 = cfg.complex("E0", 0j)
    N = cfg.integer("N", 4)
    if N < 0:
        raise ConfigError("key 'N': must be >= 0", key="N")
    c = _expansion_contour(cfg, E0, units, contour, policy)
    es = integrate_expansion(pot, cfg.integer("ell", 0), E0, N, c, units,
                             cfg.number("scaleR", 1.0), strict_domain=args.strict_domain)
    _write(args.out, es.to_json() + "\n")
    return EXIT_OK


def _load_expansion(path):
    try:
        with open(path) as fh:
            return ExpansionSet.from_json(fh.read())
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"key 'expansion': cannot load {path!r}: {exc}", key="expansion") from None


def cmd_eval(cfg, pot, units, contour, args, policy="zero-im-kr"):
    if "E" not in cfg:
        raise ConfigError("eval needs key 'E'", key="E")
    E = cfg.complex("E")
    branch = cfg.sheet("sheet", PHYSICAL)
    ell = cfg.integer("ell", 0)
    source = cfg.raw("source", "direct")
    if source == "direct":
        if args.strict_domain and math.isfinite(getattr(pot, "eta", math.inf)):
            th = 0.0 if policy == "real-axis" else (
                contour.theta if policy == "explicit"
                else float(np.angle(np.sqrt(units.c2mu * E))))
            if abs(th) >= math.pi / 2 or not in_domain_D(E, pot.eta, th, units):
                raise DomainError(f"E = {E} lies outside the analyticity domain for theta = {th:.6g}")
        if policy == "explicit":
            fi, fo = jost_many(pot, ell, [E], branch, contour, units, policy="explicit")
        elif policy == "real-axis":
            fi, fo = jost_many(pot, ell, [E], branch, contour.with_(theta=0.0), units,
                               policy="explicit")
        else:
            fi, fo = jost_many(pot, ell, [E], branch, contour, units)
        fi, fo = complex(fi[0]), complex(fo[0])
    elif source == "factorized":
        th = float(np.angle(np.sqrt(units.c2mu * E))) if policy == "zero-im-kr" else contour.theta
        jp = jost_factorized(pot, ell, RiemannPoint(E, branch), contour.with_(theta=th), units,
                             strict_domain=args.strict_domain)
        fi, fo = jp.f_in, jp.f_out
    else:
        es = _load_expansion(cfg.raw("expansion", source))
        fi, fo = (complex(v) for v in approx_jost_many(es, E, branch, units))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from .jost import JostPair
        s = s_matrix(JostPair(fi, fo, RiemannPoint(E, branch)))
    rows = [(E.real, E.imag, branch.name, fi.real, fi.imag, fo.real, fo.imag, s.real, s.imag)]
    _write(args.out, _csv(["ReE", "ImE", "sheet", "Re_f_in", "Im_f_in", "Re_f_out", "Im_f_out",
                           "Re_S", "Im_S"], rows, [f"source = {source}"]))
    return EXIT_OK


def _energy_grid(cfg, lo=0.05, hi=10.0, n=200):
    emin = cfg.number("emin", lo)
    emax = cfg.number("emax", hi)
    ne = cfg.integer("ne", n)
    if not 0 < emin < emax or ne < 2:
        raise ConfigError("need 0 < emin < emax and ne >= 2", key="emin")
    return np.linspace(emin, emax, ne)


def cmd_xsection(cfg, pot, units, contour, args, policy=None):
    E = _energy_grid(cfg)
    c = contour.with_(theta=0.0)
    if "expansion" in cfg:
        es = _load_expansion(cfg.raw("expansion"))
        ells = [es.pw.ell]
        fi, fo = approx_jost_many(es, E.astype(complex), PHYSICAL, units)
        sig = [es.pw.epsilon / np.sqrt(units.c2mu * E) * np.abs(fo / fi - 1) ** 2]
        note = f"source = expansion(E0 = {_cz(es.E0)}, N = {es.N})"
    else:
        ells = [int(v) for v in cfg.numbers("ells", [0])]
        sig = [partial_cross_section(pot, l, E, c, units) for l in ells]
        note = "source = direct"
    sig = np.array(sig)
    rows = [(e, *s, s.sum()) for e, s in zip(E, sig.T)]
    _write(args.out, _csv(["E"] + [f"sigma_{l}" for l in ells] + ["sigma_sum"], rows, [note]))
    return EXIT_OK


def cmd_phaseshift(cfg, pot, units, contour, args, policy=None):
    ell = cfg.integer("ell", 0)
    grid = None
    if "emin" in cfg or "emax" in cfg or "ne" in cfg:
        grid = _energy_grid(cfg)
    refine = cfg.raw("refine", "yes").lower() not in ("no", "false", "0")
    curve = phase_shift_curve(pot, ell, grid, contour.with_(theta=0.0), units, refine=refine)
    notes = [f"delta(0+) = {FMT % curve.delta_zero}", f"delta(inf) = {FMT % curve.delta_inf}"]
    if "bound_count" in cfg:
        rep = levinson_check(curve, cfg.integer("bound_count"))
        notes.append(f"levinson difference = {FMT % rep.difference} expected = "
                     f"{FMT % rep.expected} passed = {rep.passed}")
    notes += [f"unresolved jump in [{FMT % a}, {FMT % b}]" for a, b in curve.flagged]
    _write(args.out, _csv(["E", "delta"], zip(curve.E, curve.delta), notes))
    return EXIT_OK


def cmd_effrange(cfg, pot, units, contour, args, policy=None):
    es = integrate_expansion(pot, cfg.integer("ell", 0), 0.0, 1, contour.with_(theta=0.0), units,
                             cfg.number("scaleR", 1.0), strict_domain=args.strict_domain)
    p = effective_range_params(es, units)
    _write(args.out, _csv(["a", "r0", "a_log", "a_inv_log"], [(p.a, p.r0, p.a_log, p.a_inv_log)]))
    return EXIT_OK


def cmd_fit(cfg, pot, units, contour, args, policy=None):
    if "data" not in cfg:
        raise ConfigError("fit needs key 'data' (CSV of E,value)", key="data")
    path = cfg.raw("data")
    try:
        data = np.loadtxt(path, comments="#", delimiter=",", ndmin=2)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"key 'data': {exc}", key="data") from None
    observable = cfg.raw("observable", "sigma")
    if observable not in ("sigma", "delta"):
        raise ConfigError("key 'observable': expected sigma or delta", key="observable")
    try:
        es, diag = fit_coefficients(data, cfg.integer("ell", 0), cfg.number("E0", 1.0),
                                    cfg.integer("N", 2), observable, units,
                                    cfg.number("scaleR", 1.0))
    except ValueError as exc:
        raise ConfigError(f"fit: {exc}") from None
    _write(args.out, es.to_json() + "\n")
    return EXIT_OK


def cmd_riccati_selftest(cfg, pot, units, contour, args, policy=None):
    """Power-series and Bessel routes of (j~, y~) against each other."""
    worst = 0.0
    r = 1.5
    for ell in range(4):
        for z in (0.5, 2.0, 2.99, 3.01, 2.5 + 1j, 1 - 2.5j):
            k = np.array([z / r], dtype=complex)
            (js,), (ys,) = _sc_series(ell, k * k, np.array([r + 0j]), 1.0, 0, 1.0)
            T, PJ = _bessel_tilde(ell, k, r, 1.0)
            jb = PJ / k ** ell
            worst = max(worst, float(np.max(np.abs(js - jb) / np.abs(jb))),
                        float(np.max(np.abs(ys - T) / np.abs(T))))
    ok = worst < 1e-10
    _write(args.out, f"riccati self-test: max relative gap {worst:.3e} "
                     f"{'ok' if ok else 'FAILED'}\n")
    return EXIT_OK if ok else EXIT_NUMERIC


COMMANDS = {
    "spectrum": cmd_spectrum,
    "expand": cmd_expand,
    "eval": cmd_eval,
    "xsection": cmd_xsection,
    "phaseshift": cmd_phaseshift,
    "effrange": cmd_effrange,
    "fit": cmd_fit,
    "riccati-selftest": cmd_riccati_selftest,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="jost2d", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="key = value config file")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="override one config key (repeatable)")
    ap.add_argument("--strict-domain", action="store_true",
                    help="fail (exit 4) outside the analyticity domain instead of warning")
    ap.add_argument("--tol", type=float, help="integrator relative tolerance")
    ap.add_argument("--theta", help="rotation angle, 'zero-im-kr' or 'real-axis'")
    ap.add_argument("--rmax", type=float, help="end of the integration ray")
    ap.add_argument("--out", help="output file (default stdout)")
    return ap


def run(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
            key, val = (s.strip() for s in item.split("=", 1))
            cfg.set(key, val)
        if args.tol is not None:
            cfg.set("rtol", repr(args.tol))
        if args.theta is not None:
            cfg.set("theta", args.theta)
        if args.rmax is not None:
            cfg.set("rmax", repr(args.rmax))
        pot, units = potential_from_config(cfg.entries)
        contour, policy = _contour(cfg)
        cmd = COMMANDS[args.command]
        kw = {} if args.command == "spectrum" else {"policy": policy}
        with warnings.catch_warnings():
            if args.strict_domain:
                from .errors import DomainWarning
                warnings.simplefilter("error", DomainWarning)
            return cmd(cfg, pot, units, contour, args, **kw)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except Warning as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ContourInadequateError, NonConvergenceError, IllConditionedFitError,
            ZeroDenominatorError, ZeroEnergyPoleError, JostError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
