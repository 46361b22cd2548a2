import sys

from sgreti.cli import main

sys.exit(main())
