#!/usr/bin/env python3
"""
CLI - Command Center
====================
Command-line front door over the krige library.

Every command writes a JSON report {"command", "result", "warnings"} to
stdout. Commands that also produce a data file write it to --output; when
that is `-` (stdout) the JSON report moves to stderr.

Exit codes: 0 success, 1 domain or validation failure, 2 I/O or parse failure.
Commands taking --seed are bit-reproducible for a fixed seed; without
--seed a fresh seed is drawn and reported so the run can be replayed.
"""

import argparse
import sys
from typing import List, Optional

import numpy as np

import io_client
from config import config
from io_client import ModelFile
from krige import log as klog
from krige._random import fresh_seed
from krige.elliptope import SAMPLERS, elliptope3_section
from krige.errors import InputFormatError, InvalidVariogram, KrigeError
from krige.inverse_variogram import loglik_samples
from krige.kriging import VariogramFamily, VariogramFunctionModel, gamma_from_locations, krige_predict
from krige.model_core import (
    KrigeModel,
    VariogramMatrix,
    correlation_from_gamma,
    covariance_from_gamma,
    decompose_covariance,
    gamma_from_sigma_r,
    min_sigma2,
    validate_variogram,
)
from krige.projection import SampleSet, estimate_model, estimate_sigma2, simulate_field

log = klog.get_logger('cli')

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2


def _emit(command: str, result, warnings: List[str] = None, data_on_stdout: bool = False):
    report = {'command': command, 'result': result, 'warnings': list(warnings or [])}
    io_client.write_report(report, sys.stderr if data_on_stdout else sys.stdout)


def _is_stdout(path: str) -> bool:
    return str(path) == '-'


# ==================== COMMANDS ====================

def cmd_validate(args) -> int:
    sigma2 = args.sigma2
    if str(args.path).endswith('.json'):
        model_file = io_client.read_model_file(args.path)
        gamma = model_file.gamma
        sigma2 = model_file.sigma2 if sigma2 is None else sigma2
    else:
        gamma = io_client.read_matrix(args.path)
    report = validate_variogram(gamma, sigma2)
    _emit('validate', report.to_dict(), report.warnings)
    if not report.valid:
        for failure in report.failures():
            log.error(failure)
        return EXIT_DOMAIN
    return EXIT_OK


def cmd_convert(args) -> int:
    matrix = io_client.read_matrix(args.path)
    warnings = []

    if args.source == 'cov':
        if args.sigma2 is not None:
            warnings.append("--sigma2 ignored: sigma2 is read off the covariance trace")
        sigma2, corr = decompose_covariance(matrix)
        if args.target == 'cov':
            out = sigma2 * corr.entries
        elif args.target == 'corr':
            out = corr.entries
        else:
            out = gamma_from_sigma_r(sigma2, corr).entries
    else:
        if args.sigma2 is None:
            raise InputFormatError("--sigma2 is required when converting from gamma")
        sigma2 = args.sigma2
        gamma = VariogramMatrix(matrix)
        if args.target == 'cov':
            out = covariance_from_gamma(sigma2, gamma).entries
        elif args.target == 'corr':
            out = correlation_from_gamma(sigma2, gamma).entries
        else:
            covariance_from_gamma(sigma2, gamma)
            out = gamma.entries

    io_client.write_table(out, args.output)
    result = {'from': args.source, 'to': args.target, 'n': int(matrix.shape[0]),
              'sigma2': sigma2, 'output': args.output}
    _emit('convert', result, warnings, _is_stdout(args.output))
    return EXIT_OK


def cmd_likelihood(args) -> int:
    model = io_client.read_model(args.model)
    samples = SampleSet(io_client.read_table(args.data))
    evals = loglik_samples(samples, model)
    result = {
        'count': len(evals),
        'total': float(sum(e.loglik for e in evals)),
        'per_sample': [e.to_dict() for e in evals],
    }
    _emit('likelihood', result)
    return EXIT_OK


def cmd_estimate(args) -> int:
    samples = SampleSet(io_client.read_table(args.data))
    estimate = estimate_model(samples)
    sigma2, warnings = estimate_sigma2(samples, estimate.mu_hat, estimate.gamma_hat)
    model = KrigeModel(mu=estimate.mu_hat, sigma2=sigma2, gamma=estimate.gamma_hat)
    metadata = {
        'estimator': 'projection',
        'source': str(args.data),
        'samples': str(samples.count),
    }
    io_client.write_model(ModelFile.from_model(model, metadata), args.output)
    result = {
        'mu_hat': model.mu,
        'sigma2': model.sigma2,
        'min_sigma2': min_sigma2(model.gamma),
        'n': samples.n,
        'count': samples.count,
        'output': args.output,
    }
    _emit('estimate', result, warnings, _is_stdout(args.output))
    return EXIT_OK


def cmd_simulate(args) -> int:
    model = io_client.read_model(args.model)
    seed = fresh_seed() if args.seed is None else args.seed
    samples = simulate_field(model.gamma, args.count, seed)
    data = samples.data + model.mu if args.add_mean else samples.data
    io_client.write_table(data, args.output)
    result = {'seed': seed, 'count': samples.count, 'n': samples.n,
              'add_mean': bool(args.add_mean), 'output': args.output}
    _emit('simulate', result, [], _is_stdout(args.output))
    return EXIT_OK


def cmd_sample_prior(args) -> int:
    seed = fresh_seed() if args.seed is None else args.seed
    sampler = SAMPLERS[args.method]
    if args.method == 'rejection':
        draws = sampler(args.n, args.count, seed, max_draws=args.max_draws)
    else:
        draws = sampler(args.n, args.count, seed)

    result = draws.summary()
    result['seed'] = seed
    if args.output:
        io_client.write_table(draws.draws.reshape(draws.count, -1), args.output)
        result['output'] = args.output
    else:
        result['matrices'] = draws.draws.tolist()
    _emit('sample-prior', result, draws.warnings, bool(args.output) and _is_stdout(args.output))
    return EXIT_DOMAIN if draws.timed_out else EXIT_OK


def cmd_predict(args) -> int:
    model = io_client.read_model(args.model)
    observations = io_client.read_table(args.data)
    row = io_client.read_table(args.cov_row).ravel()
    n = model.n
    if observations.shape[1] != n:
        raise InputFormatError(f"observations have {observations.shape[1]} columns, model has n={n}")
    if row.shape[0] == n + 1:
        sigma0 = float(row[-1])
        row = row[:n]
    elif row.shape[0] == n:
        sigma0 = model.sigma2
    else:
        raise InputFormatError(f"--cov-row needs {n} or {n + 1} values, got {row.shape[0]}")

    # a stationary model needs var(Y0) = sigma2; CovarianceMatrix enforces it
    full = np.empty((n + 1, n + 1))
    full[0, 0] = sigma0
    full[0, 1:] = full[1:, 0] = row
    full[1:, 1:] = model.covariance.entries

    predictions = [krige_predict(full, y, model.mu) for y in observations]
    warnings = [w for p in predictions for w in p.warnings]
    result = {'count': len(predictions), 'predictions': [p.to_dict() for p in predictions]}
    _emit('predict', result, warnings)
    return EXIT_OK


def cmd_elliptope_section(args) -> int:
    section = elliptope3_section(args.c, args.points)
    io_client.write_table(section.boundary, args.output)
    result = section.to_dict()
    result['output'] = args.output
    _emit('elliptope-section', result, [], _is_stdout(args.output))
    return EXIT_OK


def cmd_build_gamma(args) -> int:
    locations = io_client.read_table(args.locations)
    m = VariogramFunctionModel(args.family, args.nugget, args.sill, args.range)
    built = gamma_from_locations(m, locations)
    io_client.write_table(built.gamma.entries, args.output)
    result = {'model': m.to_dict(), 'report': built.report.to_dict(), 'output': args.output}
    _emit('build-gamma', result, built.report.warnings, _is_stdout(args.output))
    return EXIT_OK


def cmd_show_config(args) -> int:
    if args.json:
        _emit('show-config', config.as_dict())
    else:
        config.print_config()
    return EXIT_OK if config.validate() else EXIT_DOMAIN


# ==================== PARSER ====================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='krige',
        description='Variogram-matrix parameterization of stationary Gaussian (Kriging) models.',
        epilog='Seeded commands are bit-reproducible; execution is single-threaded.',
    )
    parser.add_argument('--log-level', default=None, help='override KRIGE_LOG_LEVEL')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('validate', help='check the variogram conditions of a matrix or model file')
    p.add_argument('path', help="matrix CSV, model JSON, or '-'")
    p.add_argument('--sigma2', type=float, default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser('convert', help='convert between covariance, variogram and correlation')
    p.add_argument('--from', dest='source', choices=('cov', 'gamma'), required=True)
    p.add_argument('--to', dest='target', choices=('cov', 'gamma', 'corr'), required=True)
    p.add_argument('path')
    p.add_argument('--sigma2', type=float, default=None)
    p.add_argument('--output', default='-')
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser('likelihood', help='log-likelihood of observations under a model')
    p.add_argument('model')
    p.add_argument('data')
    p.set_defaults(func=cmd_likelihood)

    p = sub.add_parser('estimate', help='projection estimator of (mu, gamma)')
    p.add_argument('data')
    p.add_argument('--output', default='-')
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser('simulate', help='draw fields with the model variogram')
    p.add_argument('model')
    p.add_argument('--count', type=int, required=True)
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--add-mean', action='store_true', help='shift draws by the model mean')
    p.add_argument('--output', default='-')
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser('sample-prior', help='sample correlation matrices from the elliptope')
    p.add_argument('--method', choices=tuple(SAMPLERS), required=True)
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--count', type=int, required=True)
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--max-draws', type=int, default=None, help='rejection proposal budget')
    p.add_argument('--output', default=None, help='CSV of flattened matrices')
    p.set_defaults(func=cmd_sample_prior)

    p = sub.add_parser('predict', help='Kriging prediction at an untried location')
    p.add_argument('model')
    p.add_argument('data', help='observation rows over the model locations')
    p.add_argument('--cov-row', required=True, help='CSV row of cov(Y0, Y_i), optionally followed by var(Y0)')
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser('elliptope-section', help='boundary of the section z = c of the 3-elliptope')
    p.add_argument('--c', type=float, required=True)
    p.add_argument('--points', type=int, default=None)
    p.add_argument('--output', default='-')
    p.set_defaults(func=cmd_elliptope_section)

    p = sub.add_parser('build-gamma', help='variogram matrix from locations and a variogram function')
    p.add_argument('locations')
    p.add_argument('--family', choices=[f.value for f in VariogramFamily], required=True)
    p.add_argument('--nugget', type=float, default=0.0)
    p.add_argument('--sill', type=float, required=True)
    p.add_argument('--range', type=float, required=True)
    p.add_argument('--output', default='-')
    p.set_defaults(func=cmd_build_gamma)

    p = sub.add_parser('show-config', help='print the active configuration')
    p.add_argument('--json', action='store_true')
    p.set_defaults(func=cmd_show_config)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    klog.configure(args.log_level)

    try:
        return args.func(args)
    except (InputFormatError, OSError) as e:
        log.error(str(e))
        return EXIT_IO
    except InvalidVariogram as e:
        log.error(str(e))
        _emit(args.command, {'report': e.report.to_dict()}, e.report.warnings)
        return EXIT_DOMAIN
    except KrigeError as e:
        log.error(f"{type(e).__name__}: {e}")
        return EXIT_DOMAIN


def run(argv: Optional[List[str]] = None):
    sys.exit(main(argv))


if __name__ == "__main__":
    run()
