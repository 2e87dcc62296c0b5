import sys

from valuegap.cli import main

sys.exit(main())
