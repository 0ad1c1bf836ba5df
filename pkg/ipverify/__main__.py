from ipverify.cli.main import main

raise SystemExit(main())
