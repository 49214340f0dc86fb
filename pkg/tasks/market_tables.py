# Default market setup and numerical tolerances

# Simulation setup: price step, initial prices, change limit
DEFAULT_EPSILON = 0.01
DEFAULT_INITIAL_PRICE = 0.01
DEFAULT_MAX_CHANGES = 80
DEFAULT_MAX_MOVES = 200
DEFAULT_CAPACITY = 1.0
DEFAULT_POPULATION = 1.0

# Regulator setup
DEFAULT_GAMMA_C = 0.1
DEFAULT_GAMMA_T_MIN = -0.05
DEFAULT_GAMMA_T_MAX = 0.15
DEFAULT_GAMMA_T_STEP = 0.005

# Cournot gamma grid
DEFAULT_GAMMA_MIN = 0.01
DEFAULT_GAMMA_MAX = 0.25
DEFAULT_GAMMA_STEP = 0.01

# Demand fixed point: absolute tolerance on d / M
DEMAND_XTOL = 1e-10

# Revenues closer than this (relative) count as a tie -> lower price wins
REVENUE_TIE_RTOL = 1e-12

# F(gamma) must exceed 2 by more than this to count as feasible
FEASIBILITY_TOL = 1e-9

# Slack for the Pareto inequalities, which hold with equality at the
# regulated equilibrium
PARETO_TOL = 1e-12

# Relative profit improvement that counts as a profitable deviation
DEVIATION_RTOL = 1e-7

# Grid values are rounded to this many decimals before use
GRID_DECIMALS = 12

# CSV number format (9 digits after the point)
CSV_FLOAT_FORMAT = "%.9f"
