"""Arena constants and enums"""

import math
from enum import Enum

ELO_SCALE = 400.0

# Elo per natural-log unit of strength
ELO_PER_NAT = ELO_SCALE / math.log(10.0)

# Fixed at Elo 0 whenever it takes part in a tournament
ANCHOR_AGENT = "random"


class AgentKind(str, Enum):
    RANDOM = "random"
    SOLVER = "solver"
    NETWORK = "net"


class Schedule(str, Enum):
    ROUND_ROBIN = "round_robin"
    SPARSE = "sparse"
    SOLVER_ONLY = "solver_only"
