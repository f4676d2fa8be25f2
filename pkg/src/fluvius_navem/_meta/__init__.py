from fluvius import setupModule

config, logger = setupModule(__name__)
