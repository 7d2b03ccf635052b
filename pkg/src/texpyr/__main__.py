import sys

from texpyr.cli import main

sys.exit(main())
