from charseq.cli import main

main()
