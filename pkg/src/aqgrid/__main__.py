import sys

from aqgrid.cli import main

sys.exit(main())
