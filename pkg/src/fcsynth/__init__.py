# SPDX-License-Identifier: MIT

from fcsynth.cleanup import register_cleanup
from fcsynth.initialize import initialize
from fcsynth.terminal.app import run


def main() -> None:
    initialize()
    register_cleanup()
    run()


if __name__ == "__main__":
    main()
