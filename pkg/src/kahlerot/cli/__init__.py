from kahlerot.config.model import AppConfig

cli_config = AppConfig()
