#!/usr/bin/env python3
"""Writes the example robot models under data/robots.

Neutral postures are solved numerically so that the hands rest next to the objects of
the synthetic pouring scene (left hand at the cup, right hand at the bottle).
"""
import json
import math
import pathlib

import numpy as np
from scipy.optimize import minimize
from scipy.spatial.transform import Rotation

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "robots"
IDENT = [1.0, 0.0, 0.0, 0.0]


def joint(name, axis, lo, hi, origin=(0, 0, 0), rot=IDENT, kind="revolute"):
    return {"name": name, "type": kind, "axis": list(axis), "limits": [lo, hi],
            "origin": {"position": list(map(float, origin)), "orientation": list(rot)}}


def pose(p, q=IDENT):
    return {"position": list(map(float, p)), "orientation": list(q)}


def to_mat(p):
    w, x, y, z = p["orientation"]
    m = np.eye(4)
    m[:3, :3] = Rotation.from_quat([x, y, z, w]).as_matrix()
    m[:3, 3] = p["position"]
    return m


def motion(j, q):
    m = np.eye(4)
    if j["type"] == "revolute":
        m[:3, :3] = Rotation.from_rotvec(np.array(j["axis"]) * q).as_matrix()
    else:
        m[:3, 3] = np.array(j["axis"]) * q
    return m


def fk(base, chain, q):
    m = to_mat(base)
    for j, qi in zip(chain["joints"], q):
        m = m @ to_mat(j["origin"]) @ motion(j, qi)
    return m @ to_mat(chain["tool"])


def solve_neutral(base, chain, target, forward=None):
    lo = np.array([j["limits"][0] for j in chain["joints"]])
    hi = np.array([j["limits"][1] for j in chain["joints"]])
    mid = 0.5 * (lo + hi)

    def cost(q):
        m = fk(base, chain, q)
        c = np.sum((m[:3, 3] - target) ** 2)
        if forward is not None:
            c += 1e4 * np.sum((m[:3, 0] - forward) ** 2)
        return c + 1e-2 * np.sum(((q - mid) / (hi - lo)) ** 2)

    best = None
    rng = np.random.default_rng(7)
    for _ in range(40):
        x0 = rng.uniform(lo + 0.2 * (hi - lo), hi - 0.2 * (hi - lo))
        r = minimize(cost, x0, method="L-BFGS-B", bounds=list(zip(lo, hi)))
        if best is None or r.fun < best.fun:
            best = r
    m = fk(base, chain, best.x)
    print(f"  target {target} reached {np.round(m[:3, 3], 2)} cost {best.fun:.3g}")
    return [round(float(v), 6) for v in best.x]


def humanoid():
    def arm(side):
        y = 220.0 if side == "left" else -220.0
        return {"joints": [
            joint("shoulder_yaw", (0, 0, 1), -2.9, 2.9, (0, y, 350)),
            joint("shoulder_pitch", (0, 1, 0), -2.0, 2.0),
            joint("upper_arm_roll", (1, 0, 0), -2.9, 2.9),
            joint("elbow", (0, 1, 0), -2.6, 2.6, (320, 0, 0)),
            joint("forearm_roll", (1, 0, 0), -2.9, 2.9),
            joint("wrist_pitch", (0, 1, 0), -1.6, 1.6, (300, 0, 0)),
            joint("wrist_yaw", (0, 0, 1), -1.6, 1.6),
        ], "tool": pose((80, 0, 0))}
    return "humanoid_2x7", pose((0, 0, 0)), arm("left"), arm("right"), np.array([1.0, 0, 0])


def dual_arm():
    def arm(side):
        y = 400.0 if side == "left" else -400.0
        return {"joints": [
            joint("j1", (0, 0, 1), -2.8973, 2.8973, (-100, y, 333)),
            joint("j2", (0, 1, 0), -1.7628, 1.7628),
            joint("j3", (0, 0, 1), -2.8973, 2.8973, (0, 0, 316)),
            joint("j4", (0, 1, 0), -3.0718, -0.0698, (82.5, 0, 0)),
            joint("j5", (0, 0, 1), -2.8973, 2.8973, (-82.5, 0, 384)),
            joint("j6", (0, 1, 0), -0.0175, 3.7525),
            joint("j7", (0, 0, 1), -2.8973, 2.8973, (88, 0, 0)),
        ], "tool": pose((0, 0, 210))}
    return "dual_arm_2x7", pose((0, 0, 0)), arm("left"), arm("right"), None


def planar():
    def arm(side):
        y = 300.0 if side == "left" else -300.0
        return {"joints": [
            joint("base", (0, 0, 1), -2.9, 2.9, (0, y, 0)),
            joint("middle", (0, 0, 1), -2.9, 2.9, (250, 0, 0)),
            joint("end", (0, 0, 1), -2.9, 2.9, (250, 0, 0)),
        ], "tool": pose((100, 0, 0))}
    return "planar_2x3", pose((0, 0, 0)), arm("left"), arm("right"), None


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    targets = {"left": np.array([450.0, 250.0, 60.0]), "right": np.array([450.0, -250.0, 125.0])}
    for make in (humanoid, dual_arm, planar):
        name, base, left, right, forward = make()
        print(name)
        neutral = []
        for side, chain in (("left", left), ("right", right)):
            t = targets[side].copy()
            if name == "planar_2x3":
                t[2] = 0.0
            neutral += solve_neutral(base, chain, t, forward)
        doc = {"schema": "sbam/robot", "version": 1, "name": name, "base": base,
               "left": left, "right": right, "neutral": neutral}
        (OUT / f"{name}.json").write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main()
