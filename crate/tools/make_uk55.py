"""Build the bundled 55-industry UK-shaped dataset under data/uk55.

Output shares, shocks, criticality counts and inventory ratios are
published aggregates. The flow matrix, labor split and contact risk
indices are synthesized to be consistent with them.
"""
import csv
import os

import numpy as np
from scipy import sparse
from scipy.optimize import linprog
from scipy.optimize import minimize

# code & name & x% & epsS% & rli & ess & c% & epsD% & f% & fshock%
TABLE_SHOCKS = """\
A01 & Agriculture & 0.8 & 0.0 & 14 & 100 & 0.9 & -10 & 0.3 & -20
A02 & Foresty & 0.0 & -85.0 & 15 & 0 & 0.0 & -10 & 0.0 & -23
A03 & Fishing & 0.1 & 0.0 & 36 & 100 & 0.0 & -10 & 0.1 & -32
B & Mining & 1.3 & -35.3 & 31 & 51 & 0.1 & -10 & 1.4 & -33
C10-C12 & Manuf. Food-Beverages & 2.8 & -0.6 & 22 & 99 & 2.5 & -10 & 1.3 & -32
C13-C15 & Manuf. Textiles & 0.4 & -37.1 & 31 & 47 & 0.1 & -10 & 0.5 & -27
C16 & Manuf. Wood & 0.2 & -61.1 & 27 & 18 & 0.1 & -10 & 0.1 & -16
C17 & Manuf. Paper & 0.4 & -7.5 & 31 & 89 & 0.1 & -10 & 0.2 & -30
C18 & Media print & 0.3 & -6.0 & 39 & 90 & 0.1 & -10 & 0.1 & -18
C19 & Manuf. Coke-Petroleum & 0.9 & -18.3 & 36 & 71 & 1.5 & -10 & 0.7 & -33
C20 & Manuf. Chemical & 1.1 & -2.6 & 37 & 96 & 0.3 & -10 & 1.6 & -32
C21 & Manuf. Pharmaceutical & 0.7 & -1.1 & 40 & 98 & 0.3 & -10 & 1.2 & -31
C22 & Manuf. Rubber-Plastics & 0.7 & -28.3 & 29 & 60 & 0.1 & -10 & 0.6 & -28
C23 & Manuf. Minerals & 0.5 & -50.3 & 36 & 20 & 0.1 & -10 & 0.2 & -27
C24 & Manuf. Metals-basic & 0.6 & -57.7 & 27 & 20 & 0.0 & -10 & 1.7 & -33
C25 & Manuf. Metals-fabricated & 1.1 & -54.8 & 34 & 18 & 0.1 & -10 & 0.7 & -18
C26 & Manuf. Electronic & 0.8 & -38.5 & 57 & 10 & 0.2 & -10 & 1.4 & -28
C27 & Manuf. Electric & 0.4 & -33.3 & 37 & 46 & 0.1 & -10 & 0.8 & -30
C28 & Manuf. Machinery & 1.1 & -49.7 & 38 & 20 & 0.2 & -10 & 2.1 & -30
C29 & Manuf. Vehicles & 1.6 & -22.6 & 30 & 65 & 1.3 & -10 & 2.6 & -29
C30 & Manuf. Transport-other & 1.0 & -48.8 & 40 & 17 & 0.1 & -10 & 2.5 & -31
C31_C32 & Manuf. Furniture & 0.6 & -36.6 & 35 & 43 & 0.2 & -10 & 0.8 & -25
C33 & Repair-Installation & 0.4 & -3.3 & 39 & 95 & 0.0 & -10 & 0.0 & -17
D35 & Electricity-Gas & 3.2 & 0.0 & 42 & 100 & 3.6 & 0 & 0.1 & -20
E36 & Water & 0.2 & 0.0 & 33 & 100 & 0.6 & 0 & 0.0 & -11
E37-E39 & Sewage & 0.8 & 0.0 & 30 & 100 & 0.6 & 0 & 1.1 & -16
F & Construction & 7.9 & -35.6 & 28 & 51 & 0.3 & -10 & 11.5 & -6
G45 & Vehicle trade & 1.7 & -31.6 & 45 & 41 & 2.1 & -10 & 0.6 & -23
G46 & Wholesale & 3.5 & -23.6 & 50 & 51 & 3.3 & -10 & 4.3 & -30
G47 & Retail & 4.7 & -30.5 & 50 & 37 & 16.4 & -10 & 0.6 & -28
H49 & Land transport & 2.0 & -11.1 & 31 & 83 & 2.7 & -67 & 0.2 & -28
H50 & Water transport & 0.6 & -12.4 & 35 & 81 & 0.6 & -67 & 0.7 & -32
H51 & Air transport & 0.6 & -0.1 & 29 & 100 & 1.2 & -67 & 0.4 & -32
H52 & Warehousing & 1.4 & -0.5 & 30 & 99 & 0.1 & -67 & 0.4 & -26
H53 & Postal & 0.7 & 0.0 & 36 & 100 & 0.1 & 0 & 0.1 & -30
I & Accommodation-Food & 2.9 & -60.8 & 35 & 6 & 8.4 & -80 & 0.7 & -32
J58 & Publishing & 0.6 & -14.4 & 70 & 48 & 0.5 & 0 & 0.6 & -24
J59_J60 & Video-Sound-Broadcasting & 0.9 & -32.8 & 56 & 34 & 1.1 & 0 & 1.2 & -15
J61 & Telecommunications & 1.6 & -0.9 & 55 & 99 & 1.9 & 0 & 0.8 & -22
J62_J63 & IT & 2.3 & -0.2 & 71 & 99 & 0.2 & 0 & 2.6 & -13
K64 & Finance & 4.3 & 0.0 & 71 & 100 & 3.2 & 0 & 2.9 & -32
K65 & Insurance & 3.2 & 0.0 & 71 & 100 & 6.3 & 0 & 1.5 & -31
K66 & Auxil. Finance-Insurance & 1.1 & 0.0 & 72 & 100 & 0.2 & 0 & 2.0 & -33
L68 & Real estate & 7.8 & -4.8 & 49 & 6 & 25.3 & 0 & 1.0 & -8
M69_M70 & Legal & 2.8 & -2.0 & 64 & 94 & 0.0 & 0 & 1.3 & -25
M71 & Architecture-Engineering & 1.7 & 0.0 & 54 & 100 & 0.1 & 0 & 1.4 & -19
M72 & R and D & 0.5 & 0.0 & 59 & 100 & 0.0 & 0 & 1.1 & -11
M73 & Advertising & 0.6 & -22.5 & 60 & 36 & 0.0 & 0 & 0.3 & -30
M74_M75 & Other Science & 0.7 & -3.0 & 61 & 94 & 0.3 & 0 & 1.0 & -30
N & Private Administration & 4.4 & -34.9 & 36 & 42 & 1.0 & 0 & 2.7 & -29
O84 & Public Administration & 4.8 & -1.1 & 45 & 97 & 0.6 & 0 & 11.9 & -1
P85 & Education & 4.2 & 0.0 & 54 & 100 & 1.6 & 0 & 8.7 & -2
Q & Health & 7.0 & -0.1 & 36 & 100 & 2.8 & 15 & 15.0 & 1
R_S & Other Service & 3.2 & -34.5 & 39 & 47 & 5.6 & -5 & 2.5 & -10
T & Household activities & 0.2 & 0.0 &  0 & 0 & 0.8 & 0 & 0.0 & -32
"""

# code & name & as-input 1/0.5/0/NA & own-inputs 1/0.5/0/NA & n
TABLE_CRIT = """\
A01 & Agriculture & 4 & 2 & 49 & 0 & 9 & 9 & 37 & 0 & 1
A02 & Foresty & 2 & 3 & 50 & 0 & 7 & 9 & 39 & 0 & 1
A03 & Fishing & 2 & 1 & 52 & 0 & 8 & 5 & 42 & 0 & 1
B & Mining & 7 & 1 & 47 & 0 & 9 & 2 & 44 & 0 & 3
C10-C12 & Manuf. Food-Beverages & 5 & 6 & 44 & 0 & 14 & 5 & 36 & 0 & 1
C13-C15 & Manuf. Textiles & 2 & 5 & 48 & 0 & 6 & 2 & 47 & 0 & 1
C16 & Manuf. Wood & 3 & 3 & 49 & 0 & 8 & 3 & 44 & 0 & 1
C17 & Manuf. Paper & 5 & 10 & 40 & 0 & 14 & 11 & 30 & 0 & 1
C18 & Media print & 3 & 6 & 46 & 0 & 6 & 3 & 46 & 0 & 1
C19 & Manuf. Coke-Petroleum & 18 & 4 & 33 & 0 & 15 & 6 & 33 & 2 & 1
C20 & Manuf. Chemical & 21 & 10 & 24 & 0 & 15 & 6 & 34 & 0 & 1
C21 & Manuf. Pharmaceutical & 2 & 2 & 51 & 0 & 9 & 17 & 25 & 7 & 1
C22 & Manuf. Rubber-Plastics & 11 & 7 & 37 & 0 & 14 & 5 & 36 & 0 & 1
C23 & Manuf. Minerals & 8 & 2 & 44 & 2 & 7 & 1 & 47 & 0 & 1
C24 & Manuf. Metals-basic & 8 & 2 & 45 & 0 & 12 & 7 & 36 & 0 & 3
C25 & Manuf. Metals-fabricated & 12 & 4 & 39 & 0 & 5 & 3 & 47 & 0 & 1
C26 & Manuf. Electronic & 10 & 7 & 38 & 0 & 14 & 10 & 31 & 0 & 1
C27 & Manuf. Electric & 7 & 6 & 42 & 0 & 13 & 9 & 33 & 0 & 1
C28 & Manuf. Machinery & 10 & 12 & 32 & 2 & 5 & 1 & 49 & 0 & 1
C29 & Manuf. Vehicles & 4 & 5 & 46 & 0 & 14 & 10 & 31 & 0 & 1
C30 & Manuf. Transport-other & 2 & 6 & 47 & 0 & 12 & 10 & 33 & 0 & 1
C31_C32 & Manuf. Furniture & 1 & 1 & 53 & 0 & 8 & 4 & 43 & 0 & 1
C33 & Repair-Installation & 17 & 9 & 29 & 0 & 8 & 2 & 45 & 0 & 1
D35 & Electricity-Gas & 31 & 3 & 21 & 0 & 10 & 5 & 40 & 0 & 1
E36 & Water & 19 & 3 & 33 & 0 & 4 & 5 & 46 & 0 & 1
E37-E39 & Sewage & 18 & 3 & 34 & 0 & 6 & 8 & 41 & 0 & 1
F & Construction & 5 & 3 & 47 & 0 & 14 & 9 & 32 & 0 & 1
G45 & Vehicle trade & 2 & 5 & 48 & 0 & 9 & 7 & 39 & 0 & 1
G46 & Wholesale & 19 & 3 & 33 & 0 & 4 & 25 & 26 & 0 & 1
G47 & Retail & 2 & 3 & 50 & 0 & 6 & 10 & 39 & 0 & 1
H49 & Land transport & 28 & 3 & 24 & 0 & 11 & 2 & 42 & 0 & 1
H50 & Water transport & 9 & 8 & 38 & 0 & 8 & 5 & 42 & 0 & 1
H51 & Air transport & 5 & 7 & 43 & 0 & 10 & 6 & 39 & 0 & 1
H52 & Warehousing & 12 & 9 & 34 & 0 & 9 & 7 & 39 & 0 & 1
H53 & Postal & 6 & 7 & 41 & 2 & 3 & 5 & 47 & 0 & 1
I & Accommodation-Food & 5 & 3 & 47 & 0 & 7 & 6 & 42 & 0 & 1
J58 & Publishing & 1 & 2 & 52 & 0 & 10 & 14 & 31 & 0 & 1
J59_J60 & Video-Sound-Broadcasting & 2 & 2 & 51 & 0 & 9 & 5 & 37 & 7 & 1
J61 & Telecommunications & 26 & 11 & 18 & 0 & 7 & 5 & 42 & 2 & 1
J62_J63 & IT & 16 & 13 & 26 & 0 & 7 & 6 & 42 & 0 & 1
K64 & Finance & 10 & 19 & 26 & 0 & 6 & 3 & 46 & 0 & 1
K65 & Insurance & 6 & 12 & 36 & 2 & 6 & 3 & 46 & 0 & 1
K66 & Auxil. Finance-Insurance & 5 & 7 & 41 & 4 & 6 & 4 & 45 & 0 & 1
L68 & Real estate & 1 & 3 & 51 & 0 & 7 & 5 & 43 & 0 & 1
M69_M70 & Legal & 12 & 15 & 28 & 0 & 5 & 3 & 46 & 2 & 1
M71 & Architecture-Engineering & 6 & 10 & 39 & 0 & 4 & 2 & 49 & 0 & 1
M72 & R and D & 1 & 2 & 52 & 0 & 4 & 3 & 48 & 0 & 1
M73 & Advertising & 1 & 7 & 47 & 0 & 5 & 2 & 48 & 0 & 1
M74_M75 & Other Science & 1 & 8 & 46 & 0 & 4 & 1 & 50 & 0 & 1
N & Private Administration & 16 & 16 & 23 & 0 & 3 & 2 & 50 & 0 & 1
O84 & Public Administration & 6 & 3 & 45 & 2 & 5 & 2 & 48 & 0 & 1
P85 & Education & 1 & 4 & 50 & 0 & 6 & 8 & 41 & 0 & 1
Q & Health & 1 & 6 & 48 & 0 & 7 & 7 & 41 & 0 & 1
R_S & Other Service & 1 & 1 & 50 & 5 & 4 & 0 & 51 & 0 & 1
T & Household activities & 0 & 0 & 54 & 2 & 0 & 0 & 55 & 0 & 0
"""

INVENTORY_RATIOS = {
    "A01": 4.30, "A02": 4.30, "A03": 4.30, "B": 0.53, "C10-C12": 1.18,
    "C13-C15": 3.81, "C16": 1.50, "C17": 1.52, "C18": 1.11, "C19": 0.84,
    "C20": 1.92, "C21": 1.92, "C22": 1.83, "C23": 1.81, "C24": 2.06,
    "C25": 2.34, "C26": 2.18, "C27": 2.37, "C28": 2.33, "C29": 1.92,
    "C30": 1.92, "C31_C32": 2.33, "C33": 2.33, "D35": 0.53, "E36": 0.53,
    "E37-E39": 0.53, "F": 0.53, "G45": 7.69, "G46": 5.30, "G47": 3.37,
}
SERVICE_RATIO = 0.11

# place, category, visit %, duration h, crowd, physical %, industry
PLACES = [
    ("Work", "work", 21.2, 7.6, 20.0, 55.8, ""),
    ("Pre-school", "school", 8.6, 7.6, 20.0, 73.3, ""),
    ("School", "school", 12.0, 7.6, 20.0, 71.1, ""),
    ("Convenience store", "consume", 5.2, 0.4, 10.0, 8.3, "G47"),
    ("Large store", "consume", 24.1, 0.8, 21.5, 18.0, "G47"),
    ("Restaurant", "consume", 9.4, 1.4, 30.0, 30.8, "I"),
    ("Sports venue", "consume", 11.5, 2.3, 34.5, 53.8, "R_S"),
    ("Public transport", "transport", 16.3, 1.0, 40.0, 8.3, ""),
    ("Home", "home", 95.0, 18.4, 1.0, 73.7, ""),
    ("Car", "home", 58.7, 0.9, 1.0, 25.8, ""),
    ("Public urban space", "home", 6.6, 1.8, 20.0, 28.3, ""),
    ("Friends and relatives", "home", 21.0, 5.1, 3.0, 80.1, ""),
]

ONSITE = {"G45", "G47", "H49", "H50", "H51", "H52", "H53", "I", "L68",
          "M69_M70", "O84", "P85", "R_S", "T"}

# rough employment weights, refined below to match headline shares
EMPLOYMENT_PRIOR = [
    1.0, .05, .04, .2, 1.3, .3, .2, .2, .4, .03, .4, .15, .5, .3, .25, 1.0,
    .5, .3, .5, .5, .4, .7, .6, .4, .1, .5, 7.0, 1.6, 4.0, 10.0, 2.8, .1, .3,
    1.2, 1.0, 5.4, .4, .6, .7, 2.5, 1.8, .5, 1.0, 1.3, 3.0, 1.3, .4, .4, .8,
    8.5, 4.4, 8.5, 13.0, 5.0, .3,
]

# exposure, proximity on a 0-100 scale
RISK = {
    "A": (12, 45), "B": (10, 55), "C": (12, 55), "D35": (15, 50), "E": (15, 50),
    "F": (20, 68), "G45": (15, 55), "G46": (10, 50), "G47": (25, 65),
    "H49": (20, 55), "H50": (15, 55), "H51": (30, 60), "H52": (15, 55),
    "H53": (15, 50), "I": (30, 78), "J": (5, 40), "K": (5, 40), "L68": (10, 45),
    "M": (6, 45), "N": (20, 50), "O84": (25, 50), "P85": (35, 70), "Q": (85, 75),
    "R_S": (35, 72), "T": (20, 70),
}

TOTAL_OUTPUT = 3.0e6
CONSUMPTION_SHARE = 0.26
OTHER_FD_SHARE = 0.31
M_RATIO = 0.82
MIN_INTERMEDIATE = 0.08
WORKING_SHARE = 0.62
STUDENT_SHARE = 0.23


def parse(table):
    rows = []
    for line in table.strip().splitlines():
        rows.append([p.strip() for p in line.split("&")])
    return rows


def group(code, table):
    if code in table:
        return table[code]
    if code[0] in "ACEJKM" and code[0] in table:
        return table[code[0]]
    raise KeyError(code)


def input_share(code):
    if code == "T":
        return 0.0
    table = {
        "A": 0.50, "B": 0.45, "C": 0.62, "C19": 0.80, "C10-C12": 0.68,
        "D35": 0.62, "E": 0.50, "F": 0.55, "G45": 0.45, "G46": 0.45,
        "G47": 0.42, "H49": 0.52, "H50": 0.55, "H51": 0.60, "H52": 0.48,
        "H53": 0.45, "I": 0.45, "J": 0.45, "K": 0.40, "L68": 0.22, "M": 0.40,
        "N": 0.40, "O84": 0.45, "P85": 0.25, "Q": 0.35, "R_S": 0.40,
    }
    return group(code, table)


def labor_share(code):
    table = {
        "A": 0.20, "B": 0.15, "C": 0.20, "C19": 0.06, "D35": 0.12, "E": 0.22,
        "F": 0.22, "G45": 0.30, "G46": 0.28, "G47": 0.35, "H49": 0.32,
        "H50": 0.22, "H51": 0.22, "H52": 0.30, "H53": 0.42, "I": 0.36,
        "J": 0.30, "K": 0.30, "L68": 0.04, "M": 0.36, "N": 0.40, "O84": 0.42,
        "P85": 0.62, "Q": 0.55, "R_S": 0.40, "T": 1.0,
    }
    return group(code, table)


def expense_share(code):
    if code == "T":
        return 0.0
    if code.startswith("C"):
        return 0.12
    if code == "L68":
        return 0.03
    return 0.06


# supplier -> {buyer: weight}
LINKS = {
    "A01": {"C10-C12": 8, "I": 2, "A01": 4},
    "A02": {"C16": 8, "C17": 3, "D35": 1},
    "A03": {"C10-C12": 8, "I": 2},
    "B": {"C19": 8, "C23": 4, "C24": 4, "D35": 6, "C20": 2, "F": 1},
    "C10-C12": {"I": 6, "A01": 2, "G47": 1, "Q": 1},
    "C13-C15": {"C31_C32": 2, "C29": 1, "Q": 1, "G47": 1},
    "C16": {"F": 6, "C31_C32": 3, "C17": 2},
    "C17": {"C18": 5, "C10-C12": 3, "G46": 1, "H53": 1},
    "C18": {"M73": 3, "J58": 3, "O84": 1},
    "C19": {"H49": 5, "H50": 4, "H51": 6, "D35": 3, "C20": 3, "F": 2, "A01": 1},
    "C20": {"C21": 6, "C22": 5, "A01": 3, "C13-C15": 2, "C17": 1, "Q": 1},
    "C21": {"Q": 8, "C21": 2},
    "C22": {"C29": 3, "F": 2, "C10-C12": 2, "C27": 1, "C26": 1},
    "C23": {"F": 8, "C23": 2},
    "C24": {"C25": 7, "C28": 4, "C29": 4, "C30": 3, "F": 2, "C27": 2},
    "C25": {"F": 5, "C28": 3, "C29": 3, "C30": 2, "C33": 1},
    "C26": {"J62_J63": 2, "C27": 2, "C28": 2, "C29": 2, "C30": 2, "J61": 2},
    "C27": {"F": 3, "C28": 3, "C29": 2, "D35": 1},
    "C28": {"F": 2, "B": 2, "C29": 2, "A01": 1, "C10-C12": 1},
    "C29": {"G45": 6, "H49": 3, "C29": 3},
    "C30": {"H51": 5, "H50": 3, "O84": 3, "C30": 3},
    "C31_C32": {"Q": 2, "I": 1, "G47": 1},
    "C33": {"C30": 3, "H51": 3, "C28": 2, "D35": 2, "B": 2},
    "D35": {"C24": 2, "C20": 2, "E36": 2, "C23": 2, "I": 1, "L68": 1},
    "E36": {"I": 2, "Q": 2, "C10-C12": 2},
    "E37-E39": {"F": 3, "C24": 2, "O84": 2, "Q": 1},
    "F": {"L68": 8, "F": 6, "O84": 2, "D35": 1},
    "G45": {"H49": 3, "N": 2},
    "G46": {"G47": 5, "I": 2, "C10-C12": 2, "F": 2, "C29": 1, "Q": 1},
    "G47": {"I": 1, "P85": 1},
    "H49": {"G46": 3, "G47": 3, "H52": 2, "H53": 3, "C10-C12": 1},
    "H50": {"G46": 3, "H52": 2, "C19": 1},
    "H51": {"N": 3, "H53": 2, "M69_M70": 1},
    "H52": {"H49": 4, "H50": 4, "H51": 4, "G46": 2},
    "H53": {"K64": 2, "M69_M70": 2, "N": 2, "G47": 2},
    "I": {"N": 2, "M69_M70": 2, "O84": 1},
    "J58": {"M73": 3, "P85": 3, "J62_J63": 2},
    "J59_J60": {"M73": 5, "J61": 2, "R_S": 2},
    "J61": {"J62_J63": 3, "K64": 2, "J59_J60": 2},
    "J62_J63": {"K64": 4, "O84": 3, "M69_M70": 2, "J61": 2},
    "K64": {"L68": 4, "K65": 3, "K66": 3, "F": 1},
    "K65": {"K64": 2, "H50": 1, "H51": 1, "K66": 2},
    "K66": {"K64": 4, "K65": 4},
    "L68": {"G47": 4, "I": 3, "M69_M70": 2, "Q": 2, "K64": 2, "R_S": 2},
    "M69_M70": {"K64": 3, "O84": 2, "F": 1},
    "M71": {"F": 6, "C28": 1, "B": 1},
    "M72": {"C21": 6, "C26": 2, "O84": 2},
    "M73": {"G47": 3, "J58": 2, "I": 1},
    "M74_M75": {"F": 1, "A01": 1},
    "N": {"O84": 3, "K64": 2, "H51": 2},
    "O84": {"Q": 2},
    "P85": {"O84": 2, "Q": 1},
    "Q": {"O84": 3, "Q": 2},
    "R_S": {"J59_J60": 1, "I": 1},
}
BROAD = {"D35": 1.2, "H49": 1.0, "J61": 0.7, "K64": 0.9, "N": 1.5,
         "M69_M70": 1.2, "L68": 0.8, "G46": 1.0, "H52": 0.5, "C19": 0.4,
         "J62_J63": 0.6, "E37-E39": 0.3, "K65": 0.3, "F": 0.3, "H53": 0.3}


def fit_employment(rows):
    rli = np.array([float(r[4]) / 100 for r in rows])
    ess = np.array([float(r[5]) / 100 for r in rows])
    af = np.array([r[0][0] in "ABCDEF" for r in rows], dtype=float)
    prior = np.log(np.array(EMPLOYMENT_PRIOR))

    def shares(z):
        w = np.exp(z)
        return w / w.sum()

    targets = [
        (lambda w: w @ ess, 0.67),
        (lambda w: w @ rli, 0.44),
        (lambda w: w @ (ess * (1 - rli)), 0.37),
        (lambda w: w @ af, 0.15),
        (lambda w: w @ (af * (1 - rli)), 0.10),
        (lambda w: w @ (af * ess * (1 - rli)), 0.06),
    ]
    cons = [{"type": "eq", "fun": (lambda z, f=f, v=v: f(shares(z)) - v)}
            for f, v in targets]
    res = minimize(lambda z: np.sum((z - prior) ** 2), prior, constraints=cons,
                   method="SLSQP", options={"maxiter": 500, "ftol": 1e-14})
    if not res.success:
        raise RuntimeError(res.message)
    return shares(res.x)


def ras(prior, rows, cols, iters=5000):
    z = prior.copy()
    for _ in range(iters):
        rs = z.sum(axis=1)
        z *= np.divide(rows, rs, out=np.zeros_like(rows), where=rs > 0)[:, None]
        cs = z.sum(axis=0)
        z *= np.divide(cols, cs, out=np.zeros_like(cols), where=cs > 0)[None, :]
        if np.abs(z.sum(axis=1) - rows).max() < 1e-9 * rows.max():
            break
    return z


def build_flows(rows, codes):
    n = len(codes)
    idx = {c: i for i, c in enumerate(codes)}
    xs = np.array([max(float(r[2]), 0.02) for r in rows])
    cs = np.array([float(r[6]) for r in rows])
    fs = np.array([float(r[8]) for r in rows])
    x = xs / xs.sum() * TOTAL_OUTPUT
    c = cs / cs.sum() * CONSUMPTION_SHARE * TOTAL_OUTPUT
    f = fs / fs.sum() * OTHER_FD_SHARE * TOTAL_OUTPUT
    t = idx["T"]
    f[t] = 0.0
    x[t] = c[t]
    for i in range(n):
        if i != t and x[i] - c[i] - f[i] < MIN_INTERMEDIATE * x[i]:
            x[i] = (c[i] + f[i]) / (1 - MIN_INTERMEDIATE)
    u = x - c - f
    u[t] = 0.0
    alpha = np.array([input_share(code) for code in codes])
    v = alpha * x
    v *= u.sum() / v.sum()

    prior = np.full((n, n), 0.05)
    for s, w in BROAD.items():
        prior[idx[s], :] += w
    for s, buyers in LINKS.items():
        for b, w in buyers.items():
            prior[idx[s], idx[b]] += w
    for i in range(n):
        prior[i, i] += 3.0
    prior *= x[:, None] ** 0.5 * x[None, :] ** 0.5
    prior[t, :] = 0.0
    prior[:, t] = 0.0
    z = ras(prior, u, v)
    return x, z, c, f


CODES = []

# Service buyers rarely stop for lack of a specific manufactured good within
# two months; utilities, transport and business services are their usual
# critical inputs.
GOODS_TO_SERVICE_PENALTY = 5.0


def crit_cost(a, cells):
    goods = lambda c: c[0] in "ABCF"
    service = lambda c: c[0] in "GHIJKLMNOPQRST"
    return np.array([-np.log(max(a[i, j], 1e-12))
                     + (GOODS_TO_SERVICE_PENALTY
                        if goods(CODES[i]) and service(CODES[j]) else 0.0)
                     for i, j in cells])


def build_criticality(rows, codes, a):
    """Places ratings to match the published counts exactly.

    Each level is a transportation problem over the free off-diagonal cells,
    maximizing the summed log expense share so that ratings land on the
    inputs that matter most to each buyer, less a penalty on goods inputs
    rated critical for service buyers.
    """
    n = len(codes)
    t = codes.index("T")
    as_input = {1: np.array([int(r[2]) for r in rows]),
                0.5: np.array([int(r[3]) for r in rows])}
    own = {1: np.array([int(r[6]) for r in rows]),
           0.5: np.array([int(r[7]) for r in rows])}
    grid = np.zeros((n, n))
    row_left = {k: v.copy() for k, v in as_input.items()}
    col_left = {k: v.copy() for k, v in own.items()}
    for i in range(n):
        if i == t:
            continue
        grid[i, i] = 1
        row_left[1][i] -= 1
        col_left[1][i] -= 1
    for level in (1, 0.5):
        cells = [(i, j) for i in range(n) for j in range(n)
                 if grid[i, j] == 0 and i != j and t not in (i, j)]
        m = len(cells)
        rows_idx, cols_idx, vals = [], [], []
        for k, (i, j) in enumerate(cells):
            rows_idx += [i, n + j]
            cols_idx += [k, k]
            vals += [1.0, 1.0]
        eq = sparse.csr_matrix((vals, (rows_idx, cols_idx)), shape=(2 * n, m))
        rhs = np.concatenate([row_left[level], col_left[level]]).astype(float)
        cost = crit_cost(a, cells)
        res = linprog(cost, A_eq=eq, b_eq=rhs, bounds=(0, 1), method="highs")
        assert res.status == 0, res.message
        for k, (i, j) in enumerate(cells):
            if res.x[k] > 0.5:
                grid[i, j] = level
                row_left[level][i] -= 1
                col_left[level][j] -= 1
        assert not row_left[level].any() and not col_left[level].any()
    na = np.zeros((n, n), dtype=bool)
    na_rows = [i for i, r in enumerate(rows) for _ in range(int(r[5]))]
    na_cols = [j for j, r in enumerate(rows) for _ in range(int(r[9]))]
    for i, j in zip(na_rows, na_cols):
        if grid[i, j] == 0 and i != j:
            na[i, j] = True
    return grid, na


def write_io(path, codes, x, z, c, f, l, e):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["code"] + codes)
        for i, code in enumerate(codes):
            w.writerow([code] + [repr(float(v)) for v in z[i]])
        for label, vec in (("x", x), ("c", c), ("f", f), ("l", l), ("e", e)):
            w.writerow([label] + [repr(float(v)) for v in vec])


def main():
    out = os.environ.get("UK55_OUT") or os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data", "uk55")
    os.makedirs(out, exist_ok=True)
    rows = parse(TABLE_SHOCKS)
    crit_rows = parse(TABLE_CRIT)
    codes = [r[0] for r in rows]
    CODES[:] = codes
    assert [r[0] for r in crit_rows] == codes

    x, z, c, f = build_flows(rows, codes)
    x = z.sum(axis=1) + c + f
    t = codes.index("T")
    lam = np.array([labor_share(code) for code in codes])
    l = lam * x
    rest = c.sum() / M_RATIO - l[t]
    others = np.arange(len(codes)) != t
    l[others] *= rest / l[others].sum()
    e = np.array([expense_share(code) for code in codes]) * x
    profit = x - z.sum(axis=0) - l - e
    write_io(os.path.join(out, "io_table.csv"), codes, x, z, c, f, l, e)

    a = z / x[None, :]
    grid, na = build_criticality(crit_rows, codes, a)
    with open(os.path.join(out, "criticality.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["input"] + codes)
        for i, code in enumerate(codes):
            cells = []
            for j in range(len(codes)):
                if na[i, j]:
                    cells.append("NA")
                else:
                    v = grid[i, j]
                    cells.append("0.5" if v == 0.5 else str(int(v)))
            w.writerow([code] + cells)

    with open(os.path.join(out, "shocks.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["code", "name", "eps_S_pct", "rli", "ess_w", "eps_D_pct",
                    "f_shock_pct", "onsite"])
        for r in rows:
            w.writerow([r[0], r[1], r[3], r[4], r[5], r[7], r[9],
                        1 if r[0] in ONSITE else 0])

    with open(os.path.join(out, "inventory_ratios.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["code", "ratio_monthly"])
        for code in codes:
            w.writerow([code, INVENTORY_RATIOS.get(code, SERVICE_RATIO)])

    with open(os.path.join(out, "epi_places.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["place", "category", "visit_pct", "duration_h", "crowd",
                    "physical_pct", "industry"])
        for p in PLACES:
            w.writerow(p)

    with open(os.path.join(out, "criticality_counts.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["code", "as_input_critical", "as_input_important",
                    "own_critical", "own_important"])
        for r in crit_rows:
            w.writerow([r[0], r[2], r[3], r[6], r[7]])

    emp = fit_employment(rows)
    with open(os.path.join(out, "epi_industry.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["code", "exposure", "proximity", "eta"])
        for code, share in zip(codes, emp):
            ex, pr = group(code, RISK) if code not in RISK else RISK[code]
            w.writerow([code, ex, pr, f"{share * WORKING_SHARE:.6f}"])

    print("industries", len(codes))
    print("A column sum max", a.sum(axis=0).max())
    share = profit / x
    print("profit share min/max", share.min(), codes[int(np.argmin(share))], share.max())
    print("m", c.sum() / l.sum())
    print("crit placed", int((grid == 1).sum()), "important", int((grid == 0.5).sum()),
          "na", int(na.sum()))


if __name__ == "__main__":
    main()
