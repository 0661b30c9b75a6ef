"""
VANET Popular Content Distribution Simulator
Coalition-formation broadcast scheduling among vehicles sharing a popular file
"""

__version__ = "1.0.0"
__author__ = "VANET PCD Team"
__description__ = "Coalition-formation broadcast scheduling for vehicular ad hoc networks"

__all__ = [
    "ScenarioConfig",
    "parse_config",
    "load_config",
    "simulate",
    "__version__",
    "__author__",
    "__description__"
]

from vanet_pcd.utils.config import ScenarioConfig, load_config, parse_config
from vanet_pcd.core.protocol import simulate


def get_version():
    """Get the current version of the package"""
    return __version__


def main():
    """Main entry point for the command line"""
    from vanet_pcd.__main__ import main as cli_main
    return cli_main()


if __name__ == "__main__":
    import sys
    sys.exit(main())
