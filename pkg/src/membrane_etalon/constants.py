"""Physical constants used throughout.

Values are CODATA; only the vacuum speed of light is needed.
"""

SPEED_OF_LIGHT = 299792458.0  # m/s, exact
