"""Command-line front end.

Reads a JSON description of a Higgs field, runs one computation and writes
a JSON report.  Complex numbers are ``[re, im]`` pairs in both directions.

Exit status: 0 computed (and verified, where a verdict applies), 1 computed
but verification failed, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from ._seeding import derive_seed
from .cover import (DISCRIMINANT_THRESHOLD, ChartFamily, detect_ramification, parse_grid,
                    sweep_grid)
from .duality import MATCH_TOL, SMOOTH_TOL, hitchin_check, verify_dual_cover
from .errors import CommutativityError, NumericalError, SpectralCoverError
from .higgs import (COMMUTE_TOL, HiggsTuple, check_commuting, joint_spectrum,
                    pencil_determinant, spectral_residuals)

__all__ = ['JobConfig', 'InputDocument', 'InputError', 'parse_input', 'run', 'main']

TOOL_NAME = 'spectralcover'
COMMANDS = ('check', 'spectrum', 'pencil', 'residuals', 'dual-verify', 'hitchin',
            'sweep', 'ramify')
RESIDUAL_TOL = 1e-8
HITCHIN_TOL = 1e-10

EXIT_OK, EXIT_FAILED, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2, 3


class InputError(SpectralCoverError, ValueError):
    """Malformed input document or configuration."""


@dataclass
class JobConfig:
    command: str
    input: str
    output: str | None = None
    seed: int = 0
    samples: int = 200
    tol_commute: float = COMMUTE_TOL
    tol_match: float = MATCH_TOL
    tol_smooth: float = SMOOTH_TOL
    threshold: float = DISCRIMINANT_THRESHOLD
    grid: str | None = None
    point: str | None = None
    force: bool = False

    def validate(self):
        if self.command not in COMMANDS:
            raise InputError(f'unknown command {self.command!r}')
        for name in ('tol_commute', 'tol_match', 'tol_smooth', 'threshold'):
            val = getattr(self, name)
            if not (val > 0 and math.isfinite(val)):
                raise InputError(f'--{name.replace("_", "-")} must be positive and finite, got {val}')
        if self.samples < 1:
            raise InputError(f'--samples must be at least 1, got {self.samples}')


@dataclass
class InputDocument:
    n: int
    d: int
    matrices: np.ndarray | None = None
    family: list | None = None
    label: str = ''


# ---------------------------------------------------------------- parsing

def _complex(value, where):
    if (not isinstance(value, list) or len(value) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)):
        raise InputError(f'{where}: expected [re, im] pair of numbers, got {json.dumps(value)}')
    z = complex(value[0], value[1])
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InputError(f'{where}: non-finite value')
    return z


def _positive_int(doc, key):
    val = doc.get(key)
    if not isinstance(val, int) or isinstance(val, bool) or val < 1:
        raise InputError(f'field "{key}": expected positive integer, got {json.dumps(val)}')
    return val


def _square_grid(value, n, where, leaf):
    if not isinstance(value, list) or len(value) != n:
        raise InputError(f'{where}: expected {n} rows, got '
                         f'{len(value) if isinstance(value, list) else type(value).__name__}')
    out = []
    for r, row in enumerate(value):
        if not isinstance(row, list) or len(row) != n:
            raise InputError(f'{where}[{r}]: expected {n} entries')
        out.append([leaf(x, f'{where}[{r}][{c}]') for c, x in enumerate(row)])
    return out


def _monomials(d):
    def leaf(value, where):
        if not isinstance(value, list):
            raise InputError(f'{where}: expected a list of monomials')
        terms = {}
        for k, mono in enumerate(value):
            at = f'{where}[{k}]'
            if not isinstance(mono, dict) or set(mono) != {'exponents', 'coefficient'}:
                raise InputError(f'{at}: expected {{"exponents", "coefficient"}}')
            exps = mono['exponents']
            if (not isinstance(exps, list) or len(exps) != d
                    or not all(isinstance(e, int) and not isinstance(e, bool) and e >= 0
                               for e in exps)):
                raise InputError(f'{at}.exponents: expected {d} non-negative integers')
            key = tuple(exps)
            terms[key] = terms.get(key, 0j) + _complex(mono['coefficient'], f'{at}.coefficient')
        return terms
    return leaf


def parse_document(text, source='<input>'):
    """Parse and validate the text of an input document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f'{source}:{exc.lineno}:{exc.colno}: {exc.msg}') from exc
    if not isinstance(doc, dict):
        raise InputError(f'{source}: top level must be an object')
    unknown = set(doc) - {'n', 'd', 'matrices', 'family', 'label'}
    if unknown:
        raise InputError(f'{source}: unknown field(s) {sorted(unknown)}')
    n, d = _positive_int(doc, 'n'), _positive_int(doc, 'd')
    label = doc.get('label', '')
    if not isinstance(label, str):
        raise InputError('field "label": expected a string')
    has_m, has_f = 'matrices' in doc, 'family' in doc
    if has_m == has_f:
        raise InputError(f'{source}: exactly one of "matrices" or "family" is required')
    key = 'matrices' if has_m else 'family'
    comps = doc[key]
    if not isinstance(comps, list) or len(comps) != d:
        got = len(comps) if isinstance(comps, list) else type(comps).__name__
        raise InputError(f'field "{key}": expected d = {d} components, got {got}')
    if has_m:
        mats = [_square_grid(m, n, f'matrices[{j}]', _complex) for j, m in enumerate(comps)]
        return InputDocument(n, d, matrices=np.array(mats, dtype=complex), label=label)
    leaf = _monomials(d)
    fam = [_square_grid(m, n, f'family[{j}]', leaf) for j, m in enumerate(comps)]
    return InputDocument(n, d, family=fam, label=label)


def parse_input(path):
    """Read and validate the input document at ``path`` (``-`` for stdin)."""
    try:
        if path == '-':
            text = sys.stdin.read()
        else:
            with open(path, encoding='utf-8') as fh:
                text = fh.read()
    except OSError as exc:
        raise InputError(f'{path}: {exc.strerror}') from exc
    return parse_document(text, path)


# --------------------------------------------------------------- encoding

def _c(z):
    z = complex(z)
    return [_f(z.real), _f(z.imag)]


def _f(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _spectrum(spec):
    return {
        'points': [{'w': [_c(x) for x in p.w], 'multiplicity': p.multiplicity}
                   for p in spec.points],
        'triangularization_residual': _f(spec.residual),
        'attempts': spec.attempts,
    }


def _chart_point(p):
    return [_c(x) for x in p.chart_point]


# --------------------------------------------------------------- commands

def _tuple(doc, cfg):
    if doc.matrices is None:
        raise InputError(f'command {cfg.command!r} needs constant "matrices" input')
    return HiggsTuple(doc.matrices, tol=cfg.tol_commute, force=cfg.force)


def _family(doc, cfg):
    if cfg.grid is None:
        raise InputError(f'command {cfg.command!r} needs --grid')
    try:
        grid = parse_grid(cfg.grid)
    except ValueError as exc:
        raise InputError(f'--grid: {exc}') from exc
    seed = derive_seed(cfg.seed, 'family_precheck')
    if doc.family is not None:
        fam = ChartFamily(doc.n, doc.d, doc.family, label=doc.label,
                          precheck=not cfg.force, tol=cfg.tol_commute, seed=seed)
    else:
        fam = ChartFamily.constant(doc.matrices, label=doc.label,
                                   precheck=not cfg.force, tol=cfg.tol_commute, seed=seed)
    if grid.d != fam.d:
        raise InputError(f'--grid has {grid.d} axes but the base has dimension {fam.d}')
    return fam, grid


def _cmd_check(doc, cfg):
    if doc.matrices is None:
        raise InputError('command "check" needs constant "matrices" input')
    rep = check_commuting(doc.matrices, cfg.tol_commute)
    payload = {'max_commutator': _f(rep.max_commutator), 'passed': bool(rep.passed),
               'worst_pair': list(rep.worst_pair) if rep.worst_pair else None}
    return payload, 'passed' if rep.passed else 'failed'


def _cmd_spectrum(doc, cfg):
    spec = joint_spectrum(_tuple(doc, cfg), seed=derive_seed(cfg.seed, 'joint_spectrum'))
    return _spectrum(spec), None


def _cmd_pencil(doc, cfg):
    f = pencil_determinant(_tuple(doc, cfg), seed=derive_seed(cfg.seed, 'pencil'))
    return {'num_vars': f.num_vars, 'degree': f.degree, 'canonical_text': f.to_text()}, None


def _parse_point(text, d):
    try:
        vals = [complex(v.replace(' ', '')) for v in text.split(',')]
    except ValueError as exc:
        raise InputError(f'--point: {exc}') from exc
    if len(vals) != d:
        raise InputError(f'--point: expected {d} coordinates, got {len(vals)}')
    return vals


def _residual_record(rep):
    return {'w': [_c(x) for x in rep.w], 'coefficients': [_c(c) for c in rep.coefficients],
            'max_magnitude': _f(rep.max_magnitude), 'scaled_max': _f(rep.scaled_max),
            'scale': _f(rep.scale)}


def _cmd_residuals(doc, cfg):
    h = _tuple(doc, cfg)
    spec = joint_spectrum(h, seed=derive_seed(cfg.seed, 'joint_spectrum'))
    recs = []
    for k, p in enumerate(spec.points):
        recs.append(_residual_record(
            spectral_residuals(h, p.w, seed=derive_seed(cfg.seed, 'residuals', k))))
    payload = {'equation_count': None, 'monomials': None, 'spectrum_points': recs}
    probe = None
    if cfg.point is not None:
        w = _parse_point(cfg.point, h.d)
        probe = spectral_residuals(h, w, seed=derive_seed(cfg.seed, 'residuals_point'))
        payload['point'] = _residual_record(probe)
    ref = probe or spectral_residuals(h, spec.points[0].w,
                                      seed=derive_seed(cfg.seed, 'residuals', 0))
    payload['equation_count'] = ref.equation_count
    payload['monomials'] = [list(m) for m in ref.monomials]
    ok = all(r['scaled_max'] is not None and r['scaled_max'] <= RESIDUAL_TOL for r in recs)
    return payload, 'passed' if ok else 'failed'


def _cmd_dual_verify(doc, cfg):
    h = _tuple(doc, cfg)
    rep = verify_dual_cover(h, samples=cfg.samples, seed=cfg.seed, match_tol=cfg.tol_match,
                            smooth_tol=cfg.tol_smooth)
    payload = {
        'samples_requested': rep.samples_requested,
        'samples_used': rep.samples_used,
        'matched': rep.matched,
        'max_match_distance': _f(rep.max_match_distance),
        'dual_points': [{'point': _chart_point(p), 'multiplicity': p.multiplicity,
                         'hits': c}
                        for p, c in zip(rep.spectrum.points, rep.spectrum_hit_counts)],
        'unmatched_samples': [{'sample': [_c(x) for x in s], 'gauss_image': [_c(x) for x in g]}
                              for s, g in rep.unmatched_samples],
        'sampling_partial': rep.sampling_partial,
        'everywhere_singular': rep.everywhere_singular,
        'pencil': rep.pencil.to_text(),
    }
    return payload, rep.verdict


def _cmd_hitchin(doc, cfg):
    if doc.d != 1:
        raise InputError(f'command "hitchin" needs d = 1, got d = {doc.d}')
    h = _tuple(doc, cfg)
    rep = hitchin_check(h.components[0], seed=derive_seed(cfg.seed, 'hitchin'))
    payload = {'dual_chart': [_c(c) for c in rep.dual_chart.padded(h.n + 1)],
               'characteristic': [_c(c) for c in rep.characteristic.padded(h.n + 1)],
               'deviation': _f(rep.deviation)}
    return payload, 'passed' if rep.deviation <= HITCHIN_TOL else 'failed'


def _cmd_sweep(doc, cfg):
    fam, grid = _family(doc, cfg)
    slices = sweep_grid(fam, grid, seed=cfg.seed, tol=cfg.tol_commute, force=cfg.force)
    records = []
    for s in slices:
        rec = {'index': s.index, 'z': [_c(x) for x in s.z], 'error': s.error}
        if s.ok:
            rec.update(_spectrum(s.spectrum))
            rec['flags'] = ['repeated_sheet'] if any(p.multiplicity > 1
                                                     for p in s.spectrum.points) else []
        else:
            rec['flags'] = ['failed']
        records.append(rec)
    return {'grid_shape': list(grid.shape), 'records': records}, None


def _cmd_ramify(doc, cfg):
    fam, grid = _family(doc, cfg)
    rep = detect_ramification(fam, grid, seed=cfg.seed, threshold=cfg.threshold,
                              tol=cfg.tol_commute, force=cfg.force)
    pts = grid.points()
    payload = {
        'grid_shape': list(grid.shape),
        'probes': [[_c(x) for x in v] for v in rep.probes],
        'values': [{'index': i, 'z': [_c(x) for x in z], 'normalized_discriminant': _f(v)}
                   for i, (z, v) in enumerate(zip(pts, rep.values))],
        'flagged': [{'index': i, 'z': [_c(x) for x in z], 'normalized_discriminant': _f(v)}
                    for i, z, v in rep.flagged],
        'failures': [{'index': i, 'z': [_c(x) for x in z], 'error': e}
                     for i, z, e in rep.failures],
    }
    return payload, None


_DISPATCH = {
    'check': _cmd_check, 'spectrum': _cmd_spectrum, 'pencil': _cmd_pencil,
    'residuals': _cmd_residuals, 'dual-verify': _cmd_dual_verify, 'hitchin': _cmd_hitchin,
    'sweep': _cmd_sweep, 'ramify': _cmd_ramify,
}


def _status(verdict):
    return EXIT_FAILED if verdict == 'failed' else EXIT_OK


def run(config):
    """Execute one job; returns ``(exit_status, report)``.

    Every failure is captured into the report under ``"error"`` with its
    exception type and message.
    """
    report = {
        'tool': {'name': TOOL_NAME, 'version': __version__},
        'config': {k: v for k, v in asdict(config).items() if k != 'output'},
        'tolerances': {'commute': config.tol_commute, 'match': config.tol_match,
                       'smooth': config.tol_smooth, 'threshold': config.threshold,
                       'residual': RESIDUAL_TOL, 'hitchin': HITCHIN_TOL},
    }
    try:
        config.validate()
        doc = parse_input(config.input)
        report['input'] = {'n': doc.n, 'd': doc.d, 'label': doc.label,
                           'kind': 'matrices' if doc.matrices is not None else 'family'}
        payload, verdict = _DISPATCH[config.command](doc, config)
        status = _status(verdict)
        report['payload'] = payload
        report['verdict'] = verdict
    except (InputError, CommutativityError, ValueError) as exc:
        status = EXIT_INVALID
        report['error'] = {'type': type(exc).__name__, 'message': str(exc)}
    except NumericalError as exc:
        status = EXIT_NUMERICAL
        report['error'] = {'type': type(exc).__name__, 'message': str(exc)}
    report['exit_status'] = status
    return status, report


def dumps(report):
    """Deterministic JSON text of a report."""
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + '\n'


def build_parser():
    p = argparse.ArgumentParser(
        prog=TOOL_NAME, description='Spectral covers of commuting matrix tuples.')
    p.add_argument('command', choices=COMMANDS)
    p.add_argument('--input', required=True, metavar='PATH', help='input JSON document, - for stdin')
    p.add_argument('--output', metavar='PATH', help='report path (default: stdout)')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--samples', type=int, default=200, help='dual-verify sample count')
    p.add_argument('--tol-commute', type=float, default=COMMUTE_TOL)
    p.add_argument('--tol-match', type=float, default=MATCH_TOL)
    p.add_argument('--tol-smooth', type=float, default=SMOOTH_TOL)
    p.add_argument('--threshold', type=float, default=DISCRIMINANT_THRESHOLD,
                   help='ramification threshold on the normalized discriminant')
    p.add_argument('--grid', help='axis specs "center,half_width,points[,c]; ..." or "[v1|v2|...]"')
    p.add_argument('--point', help='extra fiber point for residuals, e.g. "1+2j,3"')
    p.add_argument('--force', action='store_true', help='proceed on non-commuting input')
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    config = JobConfig(**vars(args))
    status, report = run(config)
    text = dumps(report)
    if config.output:
        with open(config.output, 'w', encoding='utf-8') as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if 'error' in report:
        print(f'{TOOL_NAME}: {report["error"]["type"]}: {report["error"]["message"]}',
              file=sys.stderr)
    return status


if __name__ == '__main__':
    sys.exit(main())
