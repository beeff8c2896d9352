# SPDX-License-Identifier: MIT


def version() -> None:
    print("v0.1.0-alpha")
