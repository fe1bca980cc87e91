__version__ = "0.3.0"

SCHEMA_VERSION = "dblcat/1"

DEFAULT_MAX_CELLS = 10**6
DEFAULT_WINDOW = (3, 3)
DEFAULT_CORPUS_SIZE = 200
DEFAULT_BASE_OBJECTS = 6

# Exit codes of the command line front end
EXIT_OK = 0
EXIT_MATH_FAILURE = 1
EXIT_IO_ERROR = 2
EXIT_RESOURCE_CAP = 3

FIBRATION_KINDS = (
    "left-cart", "left-cocart", "right-cart", "right-cocart",
    "cart-left", "cart-right", "cocart-left", "cocart-right",
)
