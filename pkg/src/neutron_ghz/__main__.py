from neutron_ghz.main import start

start()
