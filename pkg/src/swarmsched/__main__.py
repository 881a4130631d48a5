import sys

from swarmsched.cli import main

sys.exit(main())
