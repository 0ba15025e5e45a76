import sys

from finitary.cli import main

sys.exit(main())
