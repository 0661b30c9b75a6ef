"""
Constants for the content distribution simulator
Contains application metadata, scenario defaults, output schemas and messages
"""

# Application Information
APP_NAME = "VANET Popular Content Distribution Simulator"
APP_VERSION = "1.0.0"
APP_DESCRIPTION = "Coalition-formation broadcast scheduling for vehicular ad hoc networks"

# Scenario defaults (highway simulation parameter table)
SCENARIO_DEFAULTS = {
    "T": 0.1,              # slot length, s
    "N": 8,                # number of OBUs
    "L": 800.0,            # fleet length, m
    "L_per_N": 0.0,        # when > 0, L = L_per_N * N
    "N_max": 8,            # maximal members in a subnetwork
    "K": 10,               # splitting period, slots
    "D": 250.0,            # RSU coverage diameter, m
    "alpha": 100.0,        # utility pricing factor
    "beta": 1.0,           # cost pricing factor
    "M": 100,              # packets in the file
    "Ms": 100e6,           # file size, bits
    "v_min": 20.0,         # m/s
    "v_max": 40.0,         # m/s
    "d_min": 100.0,        # security distance, m
    "d_max": 1000.0,       # maximal following distance, m
    "a": 1.0,              # speed step per slot, m/s
    "p": 0.1,              # probability of accelerating (and of decelerating)
    "W": 30e6,             # channel bandwidth, Hz
    "c_0": 5e6,            # V2R rate, b/s
    "eta": 1e6,            # transmit SNR
    "kappa": "10dB",       # Rician factor
    "R_los": 300.0,        # line-of-sight range, m
    "t_max": 300,          # slot horizon
    "seed": 0,
    "scheme": "proposed",
    "warm_start": False,
    "seeds_per_point": 20,
    "workers": 1,
}

SCHEMES = ("proposed", "baseline")

# Keys parsed as integers / booleans; everything else numeric is a float
INTEGER_KEYS = ("N", "N_max", "K", "M", "t_max", "seed", "seeds_per_point", "workers")
BOOLEAN_KEYS = ("warm_start",)
STRING_KEYS = ("scheme",)

# Path loss exponent of the V2V channel
PATH_LOSS_EXPONENT = 4

# Below this separation two transceivers are treated as this far apart
MIN_LINK_DISTANCE = 1e-3  # m

# Payoff comparisons closer than this are ties
PAYOFF_TOLERANCE = 1e-9

# Coalition formation round cap
DEFAULT_MAX_ROUNDS = 1000

# Output files
TRACE_FILE_TEMPLATE = "trace_{scheme}_{seed}.csv"
SUMMARY_FILE = "summary.csv"
AGGREGATE_FILE = "summary_mean.csv"

TRACE_COLUMNS = [
    "slot", "normalized_P", "transmitters", "switches",
    "subnetworks", "components", "deliveries",
]

SUMMARY_COLUMNS = [
    "scheme", "seed", "N", "L", "D", "average_delay", "completed",
    "completion_slot", "completion_fraction", "total_switches", "slots",
    "mean_transmitters", "wall_time",
]

# Exit codes
EXIT_CODES = {
    "SUCCESS": 0,
    "CONFIG_ERROR": 2,
    "RUNTIME_ERROR": 3,
}

# Performance Thresholds
PERFORMANCE_THRESHOLDS = {
    "SLOW_RUN_WARNING_TIME": 30.0,  # seconds per simulated run
}

# Error Messages
ERROR_MESSAGES = {
    "UNKNOWN_KEY": "Unknown configuration key '{key}'",
    "NOT_NUMERIC": "Configuration key '{key}' expects a number, got '{value}'",
    "NOT_INTEGER": "Configuration key '{key}' expects an integer, got '{value}'",
    "NOT_BOOLEAN": "Configuration key '{key}' expects true/false, got '{value}'",
    "NOT_POSITIVE": "Configuration key '{key}' must be positive, got {value}",
    "BAD_PROBABILITY": "Configuration key 'p' must satisfy 0 < p < 1/2, got {value}",
    "BAD_SPEEDS": "v_min ({v_min}) must not exceed v_max ({v_max})",
    "BAD_SCHEME": "Unknown scheme '{value}', expected one of: {choices}",
    "BAD_SWEEP": "Sweep expression '{value}' is not KEY=LIST",
    "CONFIG_NOT_FOUND": "Configuration file not found: {path}",
    "INFEASIBLE_FLEET": "Cannot place {n} vehicles with security distance {d_min} m on two lanes of {length} m",
}
