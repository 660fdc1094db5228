# Services Layer
