#!/usr/bin/env python3
# Copyright 2026 The bspsched Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""External MILP backend for `bspsched schedule --milp-command`.

Usage: scipy_milp_backend.py MODEL.json SOLUTION.txt [TIME_LIMIT]

Reads the JSON model written by the scheduler, solves it with scipy's HiGHS
interface and writes "status ..." followed by "name value" lines.
"""

import json
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import lil_matrix


def main(argv):
    if len(argv) < 3:
        print(__doc__, file=sys.stderr)
        return 2
    with open(argv[1]) as f:
        model = json.load(f)
    time_limit = float(argv[3]) if len(argv) > 3 else None

    variables = model["variables"]
    n = len(variables)
    c = np.array([v["objective"] for v in variables], dtype=float)
    lower = np.array([-np.inf if v["lower"] is None else v["lower"] for v in variables], dtype=float)
    upper = np.array([np.inf if v["upper"] is None else v["upper"] for v in variables], dtype=float)
    integrality = np.array([0 if v["type"] == "continuous" else 1 for v in variables])

    constraints = model["constraints"]
    a = lil_matrix((len(constraints), n))
    lo = np.full(len(constraints), -np.inf)
    hi = np.full(len(constraints), np.inf)
    for i, con in enumerate(constraints):
        for var, coef in con["terms"]:
            a[i, var] = coef
        if con["sense"] in ("<=", "="):
            hi[i] = con["rhs"]
        if con["sense"] in (">=", "="):
            lo[i] = con["rhs"]

    options = {}
    if time_limit is not None:
        options["time_limit"] = time_limit
    kwargs = {}
    if len(constraints):
        kwargs["constraints"] = LinearConstraint(a.tocsr(), lo, hi)
    res = milp(c, integrality=integrality, bounds=Bounds(lower, upper), options=options, **kwargs)

    with open(argv[2], "w") as out:
        if res.x is None:
            out.write("status infeasible\n" if res.status == 2 else "status none\n")
            return 0
        out.write("status optimal\n" if res.status == 0 else "status feasible\n")
        for v, x in zip(variables, res.x):
            out.write(f"{v['name']} {x:.12g}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
