import sys

from dforge.main import main

sys.exit(main())
