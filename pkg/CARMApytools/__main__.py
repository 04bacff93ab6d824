import sys

from CARMApytools.cli import main

sys.exit(main())
