import sys

from gridrisk.cli import main

sys.exit(main())
