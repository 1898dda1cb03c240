from blindhdr.main import run

run()
