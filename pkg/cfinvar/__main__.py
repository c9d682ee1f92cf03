"""cfinvar."""

import sys

from cfinvar.cli import main

if __name__ == '__main__':
    sys.exit(main())
