#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Quote units of CDS premia.
"""
import numpy as np


def bp_to_decimal(spread):
    # Basis points to decimal, 100 bp = 0.01
    return np.asarray(spread, dtype=float) * 1e-4


def percent_to_decimal(spread):
    return np.asarray(spread, dtype=float) * 1e-2


def to_decimal(spread, units):
    """
    Convert premia quoted in 'decimal', 'bp' or 'percent' to decimal.
    """
    units = units.lower()
    if units == 'decimal':
        return np.asarray(spread, dtype=float)
    elif units == 'bp':
        return bp_to_decimal(spread)
    elif units == 'percent':
        return percent_to_decimal(spread)
    raise ValueError("Unknown spread units '{}'. Use 'decimal', 'bp' or 'percent'.".format(units))
