#!/usr/bin/env python3

from gmsketch.main import main

if __name__ == "__main__":
    main()
