"""gentwist."""

__app_name__ = "gentwist"
__version__ = "0.1.0"
__author__ = "gentwist developers"
__copyright__ = "Copyright 2022-2026 gentwist developers"
__license__ = "MIT"
__status__ = "Development"
