import sys

from zonet.cli import main

sys.exit(main())
