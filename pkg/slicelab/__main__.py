import sys

from slicelab.main import main

sys.exit(main())
