#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Command line of CARMApytools: ``simulate``, ``price``, ``fit`` and
``compare``.

Exit codes: 0 success (also for batches with failed entities), 2 usage
error, 3 data error, 4 numerical error.
"""
import argparse
import logging
import os

from CARMApytools.base.errors import DataQualityError, NumericalError, UsageError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


def _float_list(text):
    try:
        return [float(i) for i in text.split(',') if i.strip() != '']
    except ValueError:
        raise argparse.ArgumentTypeError("'{}' is not a comma-separated list of numbers.".format(text))


def _str_list(text):
    return [i.strip() for i in text.split(',') if i.strip() != '']


def _add_common(p):
    p.add_argument('--config', help='YAML or JSON configuration file.')
    p.add_argument('--seed', type=int, help='Random seed.')
    p.add_argument('--out-dir', dest='out_dir', help='Output directory.')
    p.add_argument('--prefix', help='Prefix of output file names.')
    p.add_argument('-v', '--verbose', action='store_true', help='Debug logging.')


def _add_model(p):
    g = p.add_argument_group('CARMA model and driver')
    g.add_argument('--car1', action='store_true', help='CAR(1) model with coefficient --a1.')
    g.add_argument('--a1', type=float, help='a_1 of a CAR(1) model.')
    g.add_argument('--a', type=_float_list, help='Autoregressive coefficients a_1,...,a_p.')
    g.add_argument('--b', type=_float_list, help='Moving-average coefficients b_0,...,b_q.')
    g.add_argument('--driver', choices=['brownian', 'cpn', 'nig'], help='Levy driver.')
    g.add_argument('--drift', type=float)
    g.add_argument('--volatility', type=float)
    g.add_argument('--rate', type=float, help='Jump rate (cpn).')
    g.add_argument('--jump-mean', dest='jump_mean', type=float)
    g.add_argument('--jump-sd', dest='jump_sd', type=float)
    g.add_argument('--nig-alpha', dest='nig_alpha', type=float)
    g.add_argument('--nig-beta', dest='nig_beta', type=float)
    g.add_argument('--nig-delta', dest='nig_delta', type=float)
    g.add_argument('--nig-mu', dest='nig_mu', type=float)
    g.add_argument('--n', type=int, help='Number of steps.')
    g.add_argument('--h', type=float, help='Step length.')

    g = p.add_argument_group('Recovery and spreads')
    g.add_argument('--R', type=float, help='Constant recovery rate.')
    g.add_argument('--beta0', type=float)
    g.add_argument('--beta1', type=float)
    g.add_argument('--beta2', type=float)
    g.add_argument('--c0', type=float, help='Initial premium (decimal).')
    g.add_argument('--tenor', type=float, help='CDS maturity.')
    g.add_argument('--anchor', choices=['spread', 'intensity'],
                   help='Process driven by the integrated CARMA output.')


def _add_fit(p):
    g = p.add_argument_group('Fitting')
    g.add_argument('--model', choices=['crr', 'srr'], help='Recovery model to fit.')
    g.add_argument('--p', type=int, help='Autoregressive order.')
    g.add_argument('--q', type=int, help='Moving-average order.')
    g.add_argument('--h', type=float, help='Sampling step.')
    g.add_argument('--n-starts', dest='n_starts', type=int)
    g.add_argument('--max-iters', dest='max_iters', type=int)
    g.add_argument('--n-samples', dest='n_samples', type=int, help='MCMC draws after burn-in.')
    g.add_argument('--burn-in', dest='burn_in', type=int)
    g.add_argument('--recovery-constant', dest='recovery_constant', type=float)
    g.add_argument('--spread-units', dest='spread_units', choices=['decimal', 'bp', 'percent'])
    g.add_argument('--date-column', dest='date_column')
    g.add_argument('--value-column', dest='value_column')


def build_parser():
    from CARMApytools import __version__

    parser = argparse.ArgumentParser(
        prog='carmapy', description='Levy-driven CARMA processes and CDS premia with stochastic recovery.')
    parser.add_argument('--version', action='version', version='CARMApytools {}'.format(__version__))
    sub = parser.add_subparsers(dest='command')
    sub.required = True

    p = sub.add_parser('simulate', help='Simulate CARMA, spread and intensity paths.')
    _add_common(p)
    _add_model(p)
    p.add_argument('--modes', type=_str_list, help="Recovery models to simulate, e.g. 'crr,srr'.")

    p = sub.add_parser('price', help='Bond curve or fair CDS spread.')
    _add_common(p)
    _add_model(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument('--bond', action='store_const', const='bond', dest='price_mode')
    mode.add_argument('--cds', action='store_const', const='cds', dest='price_mode')
    p.add_argument('--short-rate', dest='short_rate', type=float)
    p.add_argument('--taus', type=_float_list, help='Bond maturities.')
    p.add_argument('--ensemble', type=int, help='Number of simulated intensity paths.')
    p.add_argument('--gamma', type=float, help='Constant intensity instead of simulated paths.')
    p.add_argument('--valuation-time', dest='valuation_time', type=float)
    p.add_argument('--recovery-mode', dest='recovery_mode', choices=['crr', 'srr'])

    p = sub.add_parser('fit', help='Fit a recovery model to a premium series.')
    _add_common(p)
    _add_fit(p)
    p.add_argument('input_csv', help='CSV file with date,value columns.')
    p.add_argument('--fit-driver', dest='fit_driver', choices=['brownian', 'nig'],
                   help='Also fit a driver to the recovered increments.')

    p = sub.add_parser('compare', help='Compare CRR and SRR by BIC over a batch of series.')
    _add_common(p)
    _add_fit(p)
    p.add_argument('manifest', help='CSV file of entity,path rows.')
    p.add_argument('--workers', type=int, help='Parallel processes.')

    return parser


def _overrides(args):
    """
    Configuration sections set by command-line flags. Unset flags are None
    and do not override.
    """
    a = vars(args)
    get = a.get
    ov = {'seed': get('seed'), 'output': {'dir': get('out_dir'), 'prefix': get('prefix')}}

    if get('car1'):
        ov['carma'] = {'a': [get('a1') if get('a1') is not None else 6.], 'b': [1.]}
    elif get('a') is not None or get('b') is not None:
        ov['carma'] = {'a': get('a'), 'b': get('b')}
    elif get('a1') is not None:
        ov['carma'] = {'a': [get('a1')], 'b': [1.]}

    ov['driver'] = {'kind': get('driver'), 'drift': get('drift'), 'volatility': get('volatility'),
                    'rate': get('rate'), 'jump_mean': get('jump_mean'), 'jump_sd': get('jump_sd'),
                    'alpha': get('nig_alpha'), 'beta': get('nig_beta'), 'delta': get('nig_delta'),
                    'mu': get('nig_mu')}
    ov['recovery'] = {'R': get('R'), 'beta0': get('beta0'), 'beta1': get('beta1'), 'beta2': get('beta2')}
    ov['grid'] = {'h': get('h'), 'n_steps': get('n')}
    ov['spread'] = {'c0': get('c0'), 'tenor': get('tenor'), 'anchor': get('anchor'),
                    'modes': get('modes'), 'units': get('spread_units')}
    ov['price'] = {'mode': get('price_mode'), 'short_rate': get('short_rate'), 'taus': get('taus'),
                   'ensemble': get('ensemble'), 'gamma': get('gamma'),
                   'valuation_time': get('valuation_time'), 'recovery_mode': get('recovery_mode')}
    ov['fit'] = {'model': get('model'), 'p': get('p'), 'q': get('q'), 'h': get('h'),
                 'recovery_constant': get('recovery_constant'),
                 'optimizer': {'n_starts': get('n_starts'), 'max_iters': get('max_iters')},
                 'mcmc': {'n_samples': get('n_samples'), 'burn_in': get('burn_in')}}
    ov['compare'] = {'workers': get('workers')}

    return ov


def resolve_config(args):
    """
    Defaults, then the configuration file, then command-line flags.

    Returns:
        RunConfig
    """
    from CARMApytools.config import RunConfig

    if getattr(args, 'config', None):
        config = RunConfig.from_file(args.config)
    else:
        config = RunConfig()

    return config.merge(_overrides(args))


def _paths(config, *names):
    out = config['output']
    os.makedirs(out['dir'], exist_ok=True)
    return [os.path.join(out['dir'], '{}_{}'.format(out['prefix'], n)) for n in names]


def _lag1(y):
    import numpy as np

    yc = y - np.mean(y)
    den = np.sum(yc**2)
    return float(np.sum(yc[1:] * yc[:-1]) / den) if den > 0 else float('nan')


def cmd_simulate(config, args=None):
    """
    Simulate one CARMA path and the spread and intensity paths of every
    requested recovery model. Writes ``<prefix>_state.csv``,
    ``<prefix>_<mode>_spread.csv`` and ``<prefix>_summary.csv``.
    """
    import numpy as np
    from CARMApytools.base.output import Output
    from CARMApytools.base.errors import StationarityError
    from CARMApytools.carma import build_system, is_stationary
    from CARMApytools.credit import generate_spread_path, recovery_rate

    spec = config.carma_spec()
    driver = config.driver()
    if not is_stationary(build_system(spec)):
        raise StationarityError('The CARMA specification {} is not stationary.'.format(spec))
    grid, spread = config['grid'], config['spread']
    modes = spread['modes']
    if len(modes) == 0 or any([m not in ['crr', 'srr'] for m in modes]):
        raise UsageError("spread.modes must list 'crr' and/or 'srr', got {}.".format(modes))
    header = Output.header(config.to_json(), config.seed)

    summary = []
    path = None
    for mode in modes:
        params = config.recovery(mode)
        # Same seed: every mode shares one CARMA path
        spr, ity, path = generate_spread_path(
            spec, driver, params, spread['c0'], grid['h'], grid['n_steps'], rng=config.seed,
            tenor=spread['tenor'], anchor=spread['anchor'], allow_range_warning=True)
        fname, = _paths(config, '{}_spread.csv'.format(mode))
        Output.write_spread_path(fname, spr, ity, params, header)
        R = np.array(recovery_rate(params, ity.gamma))
        summary.extend([('{}_R_min'.format(mode), float(R.min())), ('{}_R_max'.format(mode), float(R.max())),
                        ('{}_premium_min'.format(mode), float(spr.premium.min())),
                        ('{}_premium_max'.format(mode), float(spr.premium.max()))])
        if params.mode == 'stochastic' and params.range_warning:
            summary.append(('{}_range_warning'.format(mode), 'true'))

    fstate, fsummary = _paths(config, 'state.csv', 'summary.csv')
    Output.write_state_path(fstate, path, header)
    y = path.outputs
    summary = [('Y_mean', float(np.mean(y))), ('Y_variance', float(np.var(y, ddof=1))),
               ('Y_lag1_autocorrelation', _lag1(y))] + summary
    Output.write_summary(fsummary, summary, header)
    for key, value in summary:
        print('{:<28s}{}'.format(key, value))

    return EXIT_OK


def cmd_price(config, args=None):
    """
    ``bond`` mode writes ``<prefix>_bond.csv`` (tau, A, B, price, yield).
    ``cds`` mode writes ``<prefix>_cds.csv`` with the fair spread and its
    Monte Carlo standard error.
    """
    import numpy as np
    from CARMApytools.base.output import Output
    from CARMApytools.carma import build_system
    from CARMApytools.ats import bond_curve
    from CARMApytools.credit import (DiscountCurve, IntensityPath, fair_spread_stderr,
                                     generate_spread_path, invert_spread, credit_triangle_spread)
    from CARMApytools.levy import make_rng

    spec = config.carma_spec()
    price = config['price']
    header = Output.header(config.to_json(), config.seed)

    if price['mode'] == 'bond':
        if spec.p != 1:
            from CARMApytools.base.errors import UnsupportedConfigurationError
            raise UnsupportedConfigurationError(
                'Bond pricing is defined for CAR(1) short rates only, got p = {}.'.format(spec.p))
        curve = bond_curve(build_system(spec), price['taus'], price['short_rate'])
        fname, = _paths(config, 'bond.csv')
        Output.write_table(fname, curve, header)
        print(curve.to_string(index=False))
        return EXIT_OK
    elif price['mode'] != 'cds':
        raise UsageError("price.mode must be 'bond' or 'cds', got '{}'.".format(price['mode']))

    params = config.recovery(price['recovery_mode'])
    curve = DiscountCurve(price['short_rate'])
    s, tenor, h = price['valuation_time'], config['spread']['tenor'], config['grid']['h']
    if price['gamma'] is not None:
        paths = [IntensityPath.constant(price['gamma'], s + tenor, h)]
        gamma0 = float(price['gamma'])
    else:
        if int(price['ensemble']) < 1:
            raise UsageError('price.ensemble must be at least 1.')
        n_steps = int(np.ceil((s + tenor) / h - 1e-9))
        rng = make_rng(config.seed)
        driver = config.driver()
        c0 = config['spread']['c0']
        paths = []
        for _ in range(int(price['ensemble'])):
            _, ity, _ = generate_spread_path(spec, driver, params, c0, h, n_steps, rng=rng,
                                             anchor='intensity', allow_range_warning=True)
            paths.append(ity)
        gamma0 = float(invert_spread(params, c0, upper_branch=params.range_warning))

    spread, stderr = fair_spread_stderr(paths, params, curve, s, tenor)
    summary = [('fair_spread', spread), ('stderr', stderr), ('n_paths', len(paths)),
               ('valuation_time', float(s)), ('tenor', float(tenor)), ('short_rate', curve.short_rate),
               ('gamma0', gamma0), ('credit_triangle_gamma0', float(credit_triangle_spread(params, gamma0)))]
    fname, = _paths(config, 'cds.csv')
    Output.write_summary(fname, summary, header)
    for key, value in summary:
        print('{:<28s}{}'.format(key, value))

    return EXIT_OK


def _load_premium(filename, config, date_column=None, value_column=None, entity=None):
    """
    Load, validate and impute a premium file. Returns the series, the premia
    in decimal and their log-returns. Non-positive quotes raise
    ``DataQualityError`` from :py:func:`CARMApytools.dataio.to_log_returns`.
    """
    from CARMApytools.dataio import load_csv, impute_missing, to_log_returns
    from CARMApytools.inference import MIN_OBS
    from CARMApytools.units import to_decimal

    spec = None
    if date_column is not None or value_column is not None:
        spec = {}
        for key, col in [('date', date_column), ('value', value_column)]:
            if col is not None:
                spec[key] = int(col) if str(col).isdigit() else col
    series = load_csv(filename, column_spec=spec, entity=entity)
    series.validate(MIN_OBS + 1)
    series = impute_missing(series)
    returns = to_log_returns(series)
    premium = to_decimal(series.values, config['spread']['units'])

    return series, premium, returns


def cmd_fit(config, args):
    """
    Load, impute, take log-returns and fit the configured recovery model.
    Writes ``<prefix>_fit.json``, ``<prefix>_fit.csv`` and
    ``<prefix>_fit_series.csv`` (observed and predicted log-returns).
    """
    import numpy as np
    import pandas as pd
    from CARMApytools.base.output import Output
    from CARMApytools.credit import SpreadPath, invert_spread
    from CARMApytools.inference import fit_model, kalman_filter, recover_increments
    from CARMApytools.levy import fit_driver

    series, premium, returns = _load_premium(args.input_csv, config, getattr(args, 'date_column', None),
                                             getattr(args, 'value_column', None))
    fit_config = config.fit_config()
    h = fit_config.h
    spreads = SpreadPath(np.arange(len(premium)) * h, premium, config['spread']['tenor'])
    report = fit_model(spreads, fit_config, entity=series.entity)
    if report.theta_hat is None:
        raise NumericalError('Fit failed: {}'.format('; '.join(report.warnings)))

    if report.model == 'srr':
        observed = np.diff(np.log(invert_spread(report.beta_hat, premium)))
    else:
        observed = returns
    theta = report.theta_hat
    if getattr(args, 'fit_driver', None):
        incr = recover_increments(theta, observed, h)
        report.diagnostics['driver'] = fit_driver(incr, h, kind=args.fit_driver).to_dict()
    res = kalman_filter(theta.spec, theta.driver_moments, observed, h)

    header = Output.header(config.to_json(), config.seed)
    fjson, fcsv, fseries = _paths(config, 'fit.json', 'fit.csv', 'fit_series.csv')
    Output.write_fit_report(fjson, fcsv, report, header, entity=series.entity)
    table = pd.DataFrame({'date': [str(d) for d in series.dates[1:]], 'observed': observed,
                          'predicted': res.predictions, 'variance': res.variances})
    Output.write_table(fseries, table, header)
    print(report.to_json())

    return EXIT_OK


def _compare_entity(task):
    """
    One manifest entry. Module-level so that worker processes can run it.
    """
    from CARMApytools.config import RunConfig
    from CARMApytools.inference import compare_models

    entity, filename, data, seed, date_column, value_column = task
    config = RunConfig(data)
    row = {'entity': entity, 'bic_srr': float('nan'), 'bic_crr': float('nan'),
           'preferred': None, 'status': 'failed'}
    try:
        _, premium, _ = _load_premium(filename, config, date_column, value_column, entity=entity)
        fit_config = config.fit_config().replace(seed=seed)
        srr, crr, preferred = compare_models(premium, fit_config, entity=entity)
    except (DataQualityError, OSError, NumericalError, ValueError) as err:
        logger.warning('Entity %s failed: %s', entity, err)
        row['message'] = str(err)
        return row, None

    row.update({'bic_srr': srr.bic, 'bic_crr': crr.bic, 'preferred': preferred,
                'status': 'ok' if preferred is not None else 'failed'})
    return row, {'entity': entity, 'srr': srr.to_dict(), 'crr': crr.to_dict(), 'preferred': preferred}


def cmd_compare(config, args):
    """
    Compare CRR and SRR for every entity of a manifest. Rows keep the
    manifest order. Writes ``<prefix>_compare.csv`` and
    ``<prefix>_compare_reports.json``.
    """
    import numpy as np
    from concurrent.futures import ProcessPoolExecutor
    from CARMApytools.base.output import Output
    from CARMApytools.dataio import load_manifest

    manifest = load_manifest(args.manifest)
    data = config.to_dict()
    tasks = []
    for idx, (entity, filename) in enumerate(manifest):
        seed = int(np.random.SeedSequence([config.seed, idx]).generate_state(1)[0])
        tasks.append((entity, filename, data, seed,
                      getattr(args, 'date_column', None), getattr(args, 'value_column', None)))

    workers = int(config['compare']['workers'])
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_compare_entity, tasks))
    else:
        results = [_compare_entity(t) for t in tasks]

    rows = [r for r, _ in results]
    header = Output.header(config.to_json(), config.seed)
    ftable, freports = _paths(config, 'compare.csv', 'compare_reports.json')
    fraction = Output.write_compare_table(ftable, rows, header)
    Output.write_json(freports, {'entities': [rep for _, rep in results if rep is not None]}, header)

    nfail = sum([r['status'] != 'ok' for r in rows])
    if nfail > 0:
        logger.warning('%d of %d entities failed.', nfail, len(rows))
    for r in rows:
        print('{:<20s}{:>24.10g}{:>24.10g}  {}'.format(r['entity'], r['bic_srr'], r['bic_crr'],
                                                     r['preferred'] or r['status']))
    print('fraction_srr {:.6g} ({} ok, {} failed)'.format(fraction, len(rows) - nfail, nfail))

    return EXIT_OK


COMMANDS = {
    'simulate' : cmd_simulate,
    'price'    : cmd_price,
    'fit'      : cmd_fit,
    'compare'  : cmd_compare,
}


def main(argv=None):
    """
    Entry point of the ``carmapy`` console script.

    Returns:
        int: Exit code.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return err.code

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format='%(levelname)s %(name)s: %(message)s')
    logging.captureWarnings(True)
    try:
        config = resolve_config(args)
        return COMMANDS[args.command](config, args)
    except (DataQualityError, OSError) as err:
        logger.error('%s', err)
        return EXIT_DATA
    except NumericalError as err:
        logger.error('%s', err)
        return EXIT_NUMERICAL
    except (ValueError, TypeError, NotImplementedError, KeyError) as err:
        logger.error('%s', err)
        return EXIT_USAGE
    finally:
        logging.captureWarnings(False)
