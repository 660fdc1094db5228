# App Layer
