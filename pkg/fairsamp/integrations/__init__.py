# File format integrations
