import sys

from qlga.cli import main

sys.exit(main())
