#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Daily CDS premium series: CSV input and output, imputation of missing
values and log-returns.
"""
from CARMApytools.base.errors import (DataQualityError, DuplicateDateError,
                                      MalformedRowError, UsageError)

#: Case-insensitive tokens read as missing values.
MISSING_TOKENS = ('', 'na', 'nan', 'n/a', 'null')


class RawSeries:
    """
    Dated observations with missing values.

    Args:
        dates (array[datetime64]): Strictly increasing.
        values (array[float]): ``nan`` marks a missing value.
        entity (str): Identifier of the reference entity.
        imputed (array[bool] | None): Values filled by :py:func:`impute_missing`.

    :raise DataQualityError: If dates are not strictly increasing.
    """

    def __init__(self, dates, values, entity='', imputed=None):
        import numpy as np

        self.dates = np.array(dates, dtype='datetime64[D]').reshape([-1])
        self.values = np.array(values, dtype=float).reshape([-1])
        self.entity = str(entity)
        if imputed is None:
            imputed = np.zeros(len(self.values), dtype=bool)
        self.imputed = np.array(imputed, dtype=bool).reshape([-1])
        if not len(self.dates) == len(self.values) == len(self.imputed):
            raise ValueError('Dates, values and imputation flags must have the same length.')
        diff = np.diff(self.dates).astype(int)
        if np.any(diff <= 0):
            i = int(np.argmax(diff <= 0))
            raise DataQualityError('Dates are not strictly increasing: {} is followed by {}.'.format(
                self.dates[i], self.dates[i + 1]))

    def __len__(self):
        return len(self.values)

    @property
    def missing(self):
        import numpy as np

        return np.isnan(self.values)

    @property
    def n_missing(self):
        return int(self.missing.sum())

    def validate(self, min_obs=50):
        """
        Check that the series has at least ``min_obs`` observed values.

        Returns:
            self (RawSeries)
        """
        nobs = len(self) - self.n_missing
        if nobs < min_obs:
            raise DataQualityError('Series {} has {} observed values, at least {} are needed.'.format(
                self.entity, nobs, min_obs))
        return self

    def to_dataframe(self):
        import pandas as pd

        return pd.DataFrame({'date': self.dates, 'value': self.values, 'imputed_flag': self.imputed})


def _is_missing(token):
    return token.strip().lower() in MISSING_TOKENS


def load_csv(filename, column_spec=None, entity=None):
    """
    Read a ``date,value`` CSV file. Lines starting with ``#`` are skipped and
    a header row is detected automatically. ISO-8601 dates
    (``YYYY-MM-DD``). Blank, ``NA`` and ``NaN`` values are missing. An
    ``imputed_flag`` column, as written by :py:func:`save_csv`, is read back.

    Args:
        filename (str)
        column_spec (dict | None): ``{'date': col, 'value': col}`` with column
            names (needs a header) or 0-based positions. Default: columns
            named 'date' and 'value', otherwise positions 0 and 1.
        entity (str | None): Default: the file name without extension.

    Returns:
        RawSeries

    :raise OSError: Unreadable file.
    :raise MalformedRowError: Unparsable rows, with their line numbers.
    :raise DuplicateDateError: A repeated date.
    :raise DataQualityError: Non-monotone dates.
    """
    import io
    import os
    import re
    import numpy as np
    import pandas as pd

    with open(filename, 'r') as f:
        lines = f.readlines()
    kept, lineno = [], []
    for i, line in enumerate(lines):
        if line.lstrip().startswith('#') or line.strip() == '':
            continue
        kept.append(line if line.endswith('\n') else line + '\n')
        lineno.append(i + 1)
    if entity is None:
        entity = os.path.splitext(os.path.basename(filename))[0]
    if len(kept) == 0:
        return RawSeries([], [], entity)

    try:
        df = pd.read_csv(io.StringIO(''.join(kept)), header=None, dtype=str,
                         keep_default_na=False, skip_blank_lines=False)
    except pd.errors.ParserError as err:
        found = re.findall(r'line (\d+)', str(err))
        bad = [lineno[int(j) - 1] for j in found if 0 < int(j) <= len(lineno)]
        raise MalformedRowError('Malformed rows in {} at lines {}: {}'.format(filename, bad, err), lines=bad)
    # Short rows leave NaN, empty fields stay ''
    short = df.isna()
    df = df.fillna('')

    # Header: first row without a parsable date
    first = [str(i).strip() for i in df.iloc[0].tolist()]
    has_header = all(pd.isna(pd.to_datetime([i], format='%Y-%m-%d', errors='coerce'))[0] for i in first)
    names = [i.lower() for i in first] if has_header else []
    if has_header:
        df = df.iloc[1:]
        short = short.iloc[1:]
        lineno = lineno[1:]

    def locate(key, default):
        if column_spec is not None and key in column_spec:
            col = column_spec[key]
            if isinstance(col, str):
                if col.lower() not in names:
                    raise UsageError("Column '{}' not found in the header of {}.".format(col, filename))
                return names.index(col.lower())
            return int(col)
        if key in names:
            return names.index(key)
        return default

    icol_d = locate('date', 0)
    icol_v = locate('value', 1)
    icol_f = names.index('imputed_flag') if 'imputed_flag' in names else None
    if max(icol_d, icol_v) >= df.shape[1]:
        raise MalformedRowError('{} has {} columns, value column {} requested.'.format(
            filename, df.shape[1], max(icol_d, icol_v)), lines=[])

    dtok = [str(i).strip() for i in df.iloc[:, icol_d].tolist()]
    vtok = [str(i) for i in df.iloc[:, icol_v].tolist()]
    vshort = short.iloc[:, icol_v].tolist()
    dates = pd.to_datetime(dtok, format='%Y-%m-%d', errors='coerce')
    values = np.full(len(vtok), np.nan)
    bad = []
    for i, tok in enumerate(vtok):
        if pd.isna(dates[i]) or vshort[i]:
            bad.append(lineno[i])
            continue
        if _is_missing(tok):
            continue
        val = pd.to_numeric(tok.strip(), errors='coerce')
        if pd.isna(val) or not np.isfinite(val):
            bad.append(lineno[i])
        else:
            values[i] = float(val)
    if len(bad) > 0:
        raise MalformedRowError('Malformed rows in {} at lines {}.'.format(filename, bad), lines=bad)

    dates = np.array(dates.values, dtype='datetime64[D]')
    uniq, counts = np.unique(dates, return_counts=True)
    if np.any(counts > 1):
        raise DuplicateDateError('Duplicate date {} in {}.'.format(uniq[np.argmax(counts > 1)], filename))

    imputed = None
    if icol_f is not None:
        imputed = [str(i).strip() in ['1', 'true', 'True'] for i in df.iloc[:, icol_f].tolist()]

    return RawSeries(dates, values, entity, imputed)


def save_csv(series, filename, header=None):
    """
    Write ``date,value,imputed_flag``. Values use ``%.17g``, missing values
    ``NA``.

    Args:
        series (RawSeries)
        filename (str)
        header (list[str] | None): Comment lines written first, without '#'.
    """
    import numpy as np

    with open(filename, 'w') as f:
        if header is not None:
            for line in header:
                f.write('# {}\n'.format(line))
        f.write('date,value,imputed_flag\n')
        for d, v, m in zip(series.dates, series.values, series.imputed):
            val = 'NA' if np.isnan(v) else '{:.17g}'.format(v)
            f.write('{},{},{:d}\n'.format(np.datetime_as_string(d, unit='D'), val, int(m)))


def load_manifest(filename):
    """
    Read a batch manifest of ``entity,path`` rows. Relative paths are taken
    from the manifest directory. A header row ``entity,path`` is optional.

    Returns:
        list[tuple[str, str]]

    :raise UsageError: Empty manifest or malformed row.
    """
    import io
    import os
    import pandas as pd

    with open(filename, 'r') as f:
        lines = [i for i in f.readlines() if i.strip() != '' and not i.lstrip().startswith('#')]
    if len(lines) == 0:
        raise UsageError('Manifest {} lists no entities.'.format(filename))
    df = pd.read_csv(io.StringIO(''.join(lines)), header=None, dtype=str, keep_default_na=False)
    if df.shape[1] < 2:
        raise UsageError('Manifest rows must be entity,path.')
    rows = [(str(e).strip(), str(p).strip()) for e, p in zip(df.iloc[:, 0], df.iloc[:, 1])]
    if rows[0][0].lower() == 'entity' and rows[0][1].lower() == 'path':
        rows = rows[1:]
    if len(rows) == 0:
        raise UsageError('Manifest {} lists no entities.'.format(filename))

    base = os.path.dirname(os.path.abspath(filename))
    return [(e, p if os.path.isabs(p) else os.path.join(base, p)) for e, p in rows]


def _gaps(missing):
    """
    (start index, length) of runs of missing values.
    """
    import numpy as np

    m = np.concatenate([[0], missing.astype(int), [0]])
    d = np.diff(m)
    starts = np.nonzero(d == 1)[0]
    ends = np.nonzero(d == -1)[0]
    return list(zip(starts.tolist(), (ends - starts).tolist()))


def impute_missing(series, window=5, max_gap=5, max_fraction=0.2):
    """
    Replace each missing value by the mean of the ``window`` nearest observed
    values by index distance, ties going to the earlier date. Only values
    observed in the input are used.

    Args:
        series (RawSeries)
        window (int)
        max_gap (int): Longest run of missing values accepted.
        max_fraction (float): Missing fraction must be below this.

    Returns:
        RawSeries: New series with ``imputed`` flags set.

    :raise DataQualityError: All missing, too many missing or a gap too long.
    """
    import numpy as np

    missing = series.missing
    n = len(series)
    if n == 0 or missing.all():
        raise DataQualityError('Series {} has no observed values.'.format(series.entity))
    frac = missing.mean()
    gaps = [(s, l) for s, l in _gaps(missing) if l > max_gap]
    if frac >= max_fraction or len(gaps) > 0:
        listing = ', '.join('{} ({} values)'.format(series.dates[s], l) for s, l in _gaps(missing))
        raise DataQualityError(
            'Series {}: {:.1%} missing (limit {:.0%}), longest gap {} (limit {}). Gaps: {}.'.format(
                series.entity, frac, max_fraction, max([l for _, l in _gaps(missing)]), max_gap, listing))

    values = series.values.copy()
    observed = np.nonzero(~missing)[0]
    for i in np.nonzero(missing)[0]:
        dist = np.abs(observed - i)
        order = np.lexsort((observed, dist))[:window]
        values[i] = np.mean(series.values[observed[order]])

    return RawSeries(series.dates, values, series.entity, series.imputed | missing)


def to_log_returns(series):
    """
    :math:`r_{k} = \\log v_{k} - \\log v_{k-1}`.

    Args:
        series (RawSeries | array[float]): Positive, no missing values.

    Returns:
        array[float]: n-1 returns.

    :raise DataQualityError: Missing or non-positive value, naming the index.
    """
    import numpy as np

    values = series.values if hasattr(series, 'values') else np.array(series, dtype=float)
    bad = np.nonzero(~(values > 0))[0]
    if len(bad) > 0:
        i = int(bad[0])
        raise DataQualityError('Value at index {} is {}: log-returns need positive values.'.format(i, values[i]))

    return np.diff(np.log(values))
