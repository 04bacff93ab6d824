#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Writers of command-line artifacts. Every text file starts with ``#`` lines
giving the tool version, the resolved configuration and the seed. JSON files
carry the same information under ``"header"``. Numbers are written with
``%.17g`` and no timestamps, so reruns are byte-identical.
"""


class Output():
    """
    Deal with output data files.
    """
    @classmethod
    def header(cls, config_json, seed):
        """
        Header lines, without the leading '#'.

        Args:
            config_json (str): Compact, key-sorted JSON of the resolved config.
            seed (int)

        Returns:
            list[str]
        """
        from CARMApytools import __version__

        return ['CARMApytools {}'.format(__version__),
                'config: {}'.format(config_json),
                'seed: {:d}'.format(int(seed))]

    @classmethod
    def write_table(cls, filename, df, header):
        """
        Write a pandas table as CSV after the comment header.

        Args:
            filename (str)
            df (pandas.DataFrame)
            header (list[str])
        """
        file = open(filename, 'w', newline='')
        for line in header:
            file.write('# {}\n'.format(line))
        df.to_csv(file, index=False, float_format='%.17g', lineterminator='\n')
        file.close()

        return

    @classmethod
    def write_state_path(cls, filename, path, header):
        """
        Columns ``time, Y, X1..Xp``.

        Args:
            path (StatePath)
        """
        cls.write_table(filename, path.to_dataframe(), header)

        return

    @classmethod
    def write_spread_path(cls, filename, spread, intensity, params, header):
        """
        Columns ``time, premium, gamma, recovery``.

        Args:
            spread (SpreadPath)
            intensity (IntensityPath)
            params (RecoveryParams)
        """
        from CARMApytools.credit import path_table

        cls.write_table(filename, path_table(spread, intensity, params), header)

        return

    @classmethod
    def write_summary(cls, filename, summary, header):
        """
        ``key,value`` rows in the given order.

        Args:
            summary (list[tuple]): (key, value) pairs.
        """
        file = open(filename, 'w', newline='')
        for line in header:
            file.write('# {}\n'.format(line))
        file.write('key,value\n')
        for key, value in summary:
            if isinstance(value, float):
                file.write('{},{:.17g}\n'.format(key, value))
            else:
                file.write('{},{}\n'.format(key, value))
        file.close()

        return

    @classmethod
    def write_json(cls, filename, data, header):
        """
        JSON file with the header under ``"header"``.

        Args:
            data (dict)
            header (list[str])
        """
        import json

        out = {'header': header}
        out.update(data)
        file = open(filename, 'w')
        file.write(json.dumps(out, sort_keys=True, indent=2))
        file.write('\n')
        file.close()

        return

    @classmethod
    def write_fit_report(cls, json_file, csv_file, report, header, entity=None):
        """
        Fit report as JSON and as a one-row CSV table.

        Args:
            report (FitReport)
        """
        cls.write_json(json_file, report.to_dict(), header)

        file = open(csv_file, 'w', newline='')
        for line in header:
            file.write('# {}\n'.format(line))
        file.write('{}\n'.format(report.csv_header()))
        file.write('{}\n'.format(report.csv_row(entity)))
        file.close()

        return

    @classmethod
    def write_compare_table(cls, filename, rows, header):
        """
        Batch comparison table ``entity,bic_srr,bic_crr,preferred,status``
        followed by a summary comment line with the fraction of entities
        preferring SRR among the successful ones.

        Args:
            rows (list[dict]): Keys 'entity', 'bic_srr', 'bic_crr',
                'preferred', 'status'.

        Returns:
            fraction_srr (float): ``nan`` if no entity succeeded.
        """
        import numpy as np

        ok = [r for r in rows if r['status'] == 'ok']
        if len(ok) > 0:
            fraction = float(np.mean([r['preferred'] == 'srr' for r in ok]))
        else:
            fraction = float('nan')

        file = open(filename, 'w', newline='')
        for line in header:
            file.write('# {}\n'.format(line))
        file.write('entity,bic_srr,bic_crr,preferred,status\n')
        for r in rows:
            file.write('{},{:.17g},{:.17g},{},{}\n'.format(
                r['entity'], r['bic_srr'], r['bic_crr'], r['preferred'] or '', r['status']))
        file.write('# summary: fraction_srr={:.17g} n_ok={:d} n_failed={:d}\n'.format(
            fraction, len(ok), len(rows) - len(ok)))
        file.close()

        return fraction
