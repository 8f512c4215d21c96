#!/usr/bin/env python3
"""Regenerates the shipped scenario files under scenarios/.

The 19-joint arm alternates pitch-only and yaw-only joints. It enters a
cavity through a narrow ring-shaped opening and explores it towards a goal
above (wrapped start) or beside (extended start) its initial tip position.
"""
import json
import math
import os

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "scenarios")

LINKS = 19
LENGTH = 0.1
THICKNESS = 0.02
SWING = 1.0


def arm_limits():
    limits = []
    for i in range(LINKS):
        if i % 2 == 0:
            limits.append({"pitch": [-SWING, SWING], "yaw": [0.0, 0.0]})
        else:
            limits.append({"pitch": [0.0, 0.0], "yaw": [-SWING, SWING]})
    return limits


def opening(x, gap, sphere_radius, count=10):
    ring = gap + sphere_radius
    return [
        {
            "center": [x, ring * math.cos(2 * math.pi * k / count), ring * math.sin(2 * math.pi * k / count)],
            "radius": sphere_radius,
        }
        for k in range(count)
    ]


def cavity_obstacles():
    obstacles = opening(0.45, 0.11, 0.07)
    # Rocks inside the cavity.
    obstacles.append({"center": [1.05, 0.42, 0.12], "radius": 0.06})
    obstacles.append({"center": [1.30, -0.15, 0.40], "radius": 0.07})
    obstacles.append({"center": [1.55, 0.10, -0.20], "radius": 0.06})
    return obstacles


def arm_chain():
    return {
        "base": [0.0, 0.0, 0.0],
        "base_direction": [1.0, 0.0, 0.0],
        "world_up": [0.0, 0.0, 1.0],
        "links": [{"length": LENGTH, "thickness": THICKNESS} for _ in range(LINKS)],
        "limits": arm_limits(),
    }


def cavity_wrapped():
    angles = [[0.0, 0.0] for _ in range(LINKS)]
    for i in range(7, LINKS, 2):
        angles[i] = [0.0, 0.42]
    return {
        "schema_version": 1,
        "name": "cavity_19dof",
        "chain": arm_chain(),
        "initial_angles": angles,
        "goal": [1.05, 0.25, 0.45],
        "obstacles": cavity_obstacles(),
        "planner": {"t_s": 0.2, "v_pref_speed": 0.05},
    }


def cavity_extended():
    angles = [[0.0, 0.0] for _ in range(LINKS)]
    obstacles = cavity_obstacles()
    obstacles.append({"center": [1.70, 0.12, 0.20], "radius": 0.06})
    return {
        "schema_version": 1,
        "name": "cavity_19dof_extended",
        "chain": arm_chain(),
        "initial_angles": angles,
        "goal": [1.45, 0.20, 0.45],
        "obstacles": obstacles,
        "planner": {"t_s": 0.2, "v_pref_speed": 0.05},
    }


def planar(n, goal, obstacles, name):
    # Chain in the x-y plane: world_up = +y, so pitch is the in-plane angle.
    return {
        "schema_version": 1,
        "name": name,
        "chain": {
            "base": [0.0, 0.0, 0.0],
            "base_direction": [1.0, 0.0, 0.0],
            "world_up": [0.0, 1.0, 0.0],
            "links": [{"length": 1.0, "thickness": 0.05} for _ in range(n)],
            "limits": [{"pitch": [-math.pi / 2, math.pi / 2], "yaw": [0.0, 0.0]} for _ in range(n)],
        },
        "initial_angles": [[0.0, 0.0] for _ in range(n)],
        "goal": goal,
        "obstacles": obstacles,
        "planner": {"t_s": 0.2, "v_pref_speed": 0.5},
    }


def main():
    os.makedirs(OUT, exist_ok=True)
    scenarios = [
        cavity_wrapped(),
        cavity_extended(),
        planar(2, [1.0, 1.0, 0.0], [], "planar_2link"),
        planar(3, [2.0, 1.2, 0.0], [{"center": [2.6, 0.5, 0.0], "radius": 0.25}], "planar_3link"),
    ]
    for s in scenarios:
        with open(os.path.join(OUT, s["name"] + ".json"), "w") as f:
            json.dump(s, f, indent=2)
            f.write("\n")


if __name__ == "__main__":
    main()
