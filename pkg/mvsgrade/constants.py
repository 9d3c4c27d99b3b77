TASK_TOMATO = 'tomato'
TASK_EGG = 'egg'
TASKS = (TASK_TOMATO, TASK_EGG)

CHANNEL_BINS = 256
CHANNELS = 3
PATTERN_SIZE = CHANNELS * CHANNEL_BINS  # R block, then G, then B

TOMATO_OUTPUTS = 6
EGG_OUTPUTS = 1
EGG_ACCEPT_THRESHOLD = 0.5  # output >= threshold grades Accept

# Rec.601 luma weights
LUMA_WEIGHTS = (0.299, 0.587, 0.114)

DEFAULT_BLUR_SIGMA = 1.4
DEFAULT_LOW_THRESHOLD = 0.1  # fraction of max gradient
DEFAULT_HIGH_THRESHOLD = 0.3
GAUSSIAN_TRUNCATE = 4.0  # scipy.ndimage default support, in sigmas

DEFAULT_LEARNING_RATE = 0.1
DEFAULT_MOMENTUM = 0.5
DEFAULT_MAX_EPOCHS = 1000
DEFAULT_PATIENCE = 100  # epochs without test-error improvement

STOP_PATIENCE = 'patience'
STOP_MAX_EPOCHS = 'max_epochs'

MODEL_FORMAT = 'mvsgrade-model'
MODEL_VERSION = 1
SEARCH_FORMAT = 'mvsgrade-search'

# AChem reactor
DEFAULT_CAPACITY = 50
DEFAULT_MAX_CYCLES = 10000
DEFAULT_CONSENSUS = 0.80
DEFAULT_REACTION_RATE = 0.5
DEFAULT_COLLISION_RATE = 0.2
BLEND_PROBABILITY = 0.2
MUTATION_SIGMA = 0.2  # reals are scaled by exp(N(0, sigma))
MOMENTUM_FLOOR = 0.01  # momentum 0 is scaled from here

# search bounds
MIN_LAYERS = 1
MAX_LAYERS = 4
MIN_WIDTH = 16
MAX_WIDTH = 1024
WIDTH_STEP = 1
MIN_LEARNING_RATE = 1e-4
MAX_LEARNING_RATE = 1.0
MIN_MOMENTUM = 0.0
MAX_MOMENTUM = 0.95

# stratified split, per class (train, test, validation)
TOMATO_SPLIT = (700, 100, 200)
EGG_SPLIT = (263, 56, 56)

SHIFT_HOURS = 8
BENCHMARK_HOUR = 1
SHIFT_BREAKS = (3, 5, 7)  # hours that start right after a break

DISPLAY_PLACES = 2

MVSGRADE_CONFIG = '~/.mvsgrade/config.yml'
LOG_LEVEL_ENV = 'MVSGRADE_LOG_LEVEL'
PROVENANCE_SUFFIX = '.provenance.yml'
