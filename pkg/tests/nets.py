"""Hand-built joint networks shared by several test modules."""

from __future__ import annotations

# two EC neighbours meeting a third region at one corner; bipath-consistent
# yet unsatisfiable
MEET_TRIANGLE = """\
vars v1 v2 v3
top v1 v2 EC
top v1 v3 EC
top v2 v3 DC
dir v1 v2 m*m
dir v1 v3 m*m
dir v2 v3 eq*eq
"""

# four rectangles in a pinwheel; every 3-variable subnetwork is satisfiable
PINWHEEL = """\
vars v1 v2 v3 v4
top v1 v2 DC
top v1 v3 EC
top v1 v4 DC
top v2 v3 DC
top v2 v4 EC
top v3 v4 DC
dir v1 v2 m*eq
dir v1 v3 m*mi
dir v1 v4 eq*mi
dir v2 v3 eq*mi
dir v2 v4 mi*mi
dir v3 v4 mi*eq
"""

# DIR49 network whose two components are satisfiable after bi-closure but
# not jointly
NESTED_CHAIN = """\
vars v1 v2 v3
top v1 v2 NTPP,PO
top v2 v3 TPP,NTPPi
top v1 v3 DC,NTPP
dir v1 v2 b*SDF,eq*eq
dir v2 v3 bi*SDFI,eq*eq
dir v1 v3 SDF*SDF,eq*eq
"""
