import appdirs
import logging
import os.path
import sys


logger = logging.getLogger(__name__)

CONFIG_FILE_NAME = "config.ini"
CONFIG_SECTION = "lucaswave"
IS_MACOS = sys.platform == "darwin"
IS_WINDOWS = sys.platform == "win32"
NAME = "Lucas Wavelet"
SHORT_NAME = "lucaswave"

# Built-in defaults, overridden by the config file and then by command line
# options
DEFAULTS = {
    "tol": 1e-12,
    "max_iter": 50,
    "fd_step": 1e-7,
    "quad_order": None,  # max(64, 8 * S) when unset
    "format": "table",
    "grid_points": 11,
}
FLOAT_SETTINGS = ("tol", "fd_step")
INT_SETTINGS = ("max_iter", "quad_order", "grid_points")
VALID_FORMATS = ("table", "csv")

if IS_WINDOWS:
    # C:\Users\<user>\AppData\Roaming\Lucas Wavelet
    CONFIG_DIR = appdirs.user_config_dir(NAME, "", roaming=True)

    CONFIG_PATHS = [
        # C:\ProgramData\Lucas Wavelet\config.ini
        os.path.join(appdirs.site_config_dir(NAME, ""), CONFIG_FILE_NAME),
        # C:\Users\<user>\AppData\Roaming\Lucas Wavelet\config.ini
        os.path.join(CONFIG_DIR, CONFIG_FILE_NAME),
    ]
elif IS_MACOS:
    # as this is a CLI app, this forces the app to use the XDG specification
    # instead of storing its configuration in ~/Library/Application Support
    appdirs.system = "linux2"

    # /Users/<user>/.config/lucaswave
    CONFIG_DIR = appdirs.user_config_dir(SHORT_NAME)

    CONFIG_PATHS = [
        # /etc/lucaswave/config.ini
        os.path.join("/etc", SHORT_NAME, CONFIG_FILE_NAME),  # no XDG in /etc
        # /Users/<user>/.config/lucaswave/config.ini
        os.path.join(CONFIG_DIR, CONFIG_FILE_NAME),
    ]
else:
    # /home/<user>/.config/lucaswave
    CONFIG_DIR = appdirs.user_config_dir(SHORT_NAME)

    CONFIG_PATHS = [
        # /etc/xdg/lucaswave/config.ini
        os.path.join(appdirs.site_config_dir(SHORT_NAME), CONFIG_FILE_NAME),
        # /home/<user>/.config/lucaswave/config.ini
        os.path.join(CONFIG_DIR, CONFIG_FILE_NAME),
    ]


def default_quad_order(S):
    """Gauss-Chebyshev nodes per subinterval for a basis of order S"""
    return max(64, 8 * S)
